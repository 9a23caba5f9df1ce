"""Law checking: named verdict reports with witnesses, and suite running.

Every axiom in the package reduces to comparing two concretely evaluated
cells, so reports carry the bound they were checked at, the witness element
on failure, and the seed that generated the instance.  Reruns with the same
seed and bound reproduce reports byte for byte.
"""

from __future__ import annotations

import json

_VERDICTS = ("pass", "fail")


class LawReport:
    """One checked law on one instance."""

    __slots__ = ("law", "instance", "verdict", "bound", "witness", "seed")

    def __init__(self, law: str, instance: str, verdict: str, bound,
                 witness=None, seed: int = 7):
        assert verdict in _VERDICTS, verdict
        assert bound == "exact" or isinstance(bound, int)
        self.law = law
        self.instance = instance
        self.verdict = verdict
        self.bound = bound
        self.witness = witness
        self.seed = seed

    def ok(self) -> bool:
        return self.verdict == "pass"

    def line(self) -> str:
        head = f"{self.verdict.upper():4s} {self.law} @ {self.instance} " \
               f"(bound={self.bound}, seed={self.seed})"
        if self.witness is None:
            return head
        return f"{head} witness={self.witness!r}"

    def payload(self) -> dict:
        # stable field names; witnesses flattened to strings for serialization
        return {
            "law": self.law,
            "instance": self.instance,
            "verdict": self.verdict,
            "bound": self.bound,
            "witness": None if self.witness is None else repr(self.witness),
            "seed": self.seed,
        }

    def __repr__(self):
        return f"LawReport({self.line()})"


def all_pass(reports) -> bool:
    return all(r.ok() for r in reports)


def report_lines(reports) -> str:
    return "\n".join(r.line() for r in reports)


def reports_json(reports) -> str:
    return json.dumps([r.payload() for r in reports], indent=2,
                      sort_keys=True)
