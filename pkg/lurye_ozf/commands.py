"""Command registry shared by the CLI and the plugin modules."""

import argparse
from dataclasses import dataclass, field
from typing import Awaitable, Callable, Dict, Iterator, List, Optional, Tuple

from database.report_store import ReportStore
from lurye_ozf.util.config_parser import AnalysisConfig

OK = 0
INTERNAL = 1
USAGE = 2
NEGATIVE = 3


def arg(*flags, **kwargs) -> Tuple[tuple, dict]:
    return flags, kwargs


@dataclass
class RunContext:
    args: argparse.Namespace
    config: AnalysisConfig
    store: ReportStore
    facts: List[Tuple[str, object]] = field(default_factory=list)

    @property
    def jobs(self) -> int:
        return self.config.jobs

    @property
    def seed(self) -> int:
        return self.config.seed

    def note(self, key: str, value: object):
        """Record a line for the run summary."""
        self.facts.append((key, value))


Handler = Callable[[RunContext], Awaitable[int]]


@dataclass
class Command:
    name: str
    handler: Handler
    help: str
    arguments: Tuple[Tuple[tuple, dict], ...] = ()


class CommandTable:
    def __init__(self):
        self._commands: Dict[str, Command] = {}

    def command(self, name: str, help: str = "", arguments=()):
        def register(handler: Handler) -> Handler:
            self._commands[name] = Command(name, handler, help, tuple(arguments))
            return handler

        return register

    def get(self, name: str) -> Optional[Command]:
        return self._commands.get(name)

    def __iter__(self) -> Iterator[Command]:
        return iter(sorted(self._commands.values(), key=lambda c: c.name))


routes = CommandTable()
