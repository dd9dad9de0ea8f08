"""Collects acceptance verdicts so the terminal summary can print them."""
from dataclasses import dataclass


@dataclass
class Verdict:
    number: int
    title: str
    passed: bool
    detail: str
    seconds: float
    budget: float

    def line(self) -> str:
        mark = "PASS" if self.passed else "FAIL"
        text = f"[{mark}] criterion {self.number:>2}: {self.title} ({self.seconds:.1f} s of {self.budget:g} s)"
        return f"{text}: {self.detail}" if self.detail else text


RECORDED: dict[int, Verdict] = {}


def record(number, title, passed, detail, seconds, budget):
    RECORDED[number] = Verdict(number, title, passed, detail, seconds, budget)
