class script(object):
    BANNER_TXT = """lurye-ozf v{version}
Command : {command}
Date    : {date}
Time    : {time} ({tz})
Jobs    : {jobs}  Seed : {seed}"""

    FOOTER_TXT = "{command} finished with exit code {code} in {elapsed}"

    EXIT_TXT = {
        0: "ok",
        1: "internal error",
        2: "usage or input error",
        3: "infeasible / non-member",
    }
