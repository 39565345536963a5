"""Each module here registers one command on ``lurye_ozf.commands.routes``."""
