class temp(object):
    STARTED = None
