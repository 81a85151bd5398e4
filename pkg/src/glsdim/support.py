"""Digit-restriction sets: which digit values a number's expansion may use."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterator

from .errors import ConfigError


@dataclass(frozen=True)
class SupportSet:
    """A subset of the nonnegative integers, enumerated in ascending order.

    kind is one of "finite" (indices are the members), "cofinite" (indices are
    the excluded values) or "all".  Construct through the factory methods,
    which validate and normalize (a cofinite set with nothing excluded is
    "all").
    """

    kind: str
    indices: tuple[int, ...] = ()

    @staticmethod
    def finite(members) -> "SupportSet":
        mem = tuple(sorted(set(int(i) for i in members)))
        if not mem:
            raise ValueError("finite support set must have at least one member")
        if mem[0] < 0:
            raise ValueError("support indices must be nonnegative")
        return SupportSet("finite", mem)

    @staticmethod
    def excluding(excluded) -> "SupportSet":
        exc = tuple(sorted(set(int(i) for i in excluded)))
        if exc and exc[0] < 0:
            raise ValueError("excluded indices must be nonnegative")
        if not exc:
            return SupportSet("all")
        return SupportSet("cofinite", exc)

    @staticmethod
    def everything() -> "SupportSet":
        return SupportSet("all")

    @staticmethod
    def from_spec(spec: str) -> "SupportSet":
        """Parse the CLI mini-grammar: "all", "exclude:0,5" or "only:0,2,7"."""
        spec = spec.strip()
        if spec == "all":
            return SupportSet.everything()
        try:
            if spec.startswith("only:"):
                return SupportSet.finite(int(s) for s in spec[5:].split(","))
            if spec.startswith("exclude:"):
                return SupportSet.excluding(int(s) for s in spec[8:].split(","))
        except ValueError as exc:
            raise ConfigError(f"bad support spec {spec!r}: {exc}") from None
        raise ConfigError(f"bad support spec {spec!r}: expected 'all', 'only:...' or 'exclude:...'")

    def contains(self, i: int) -> bool:
        if self.kind == "all":
            return i >= 0
        if self.kind == "finite":
            return i in self.indices
        return i >= 0 and i not in self.indices

    def iter_members(self, alphabet_size: int | None = None) -> Iterator[int]:
        """Ascending members, stopping at the family alphabet bound if finite."""
        if self.kind == "finite":
            for i in self.indices:
                if alphabet_size is not None and i >= alphabet_size:
                    break
                yield i
            return
        excluded = set(self.indices)
        i = 0
        while alphabet_size is None or i < alphabet_size:
            if i not in excluded:
                yield i
            i += 1

    def first_members(self, count: int, alphabet_size: int | None = None) -> list[int]:
        out: list[int] = []
        for i in self.iter_members(alphabet_size):
            if len(out) >= count:
                break
            out.append(i)
        return out

    def size_given(self, alphabet_size: int | None) -> int | None:
        """Number of members, or None when infinite."""
        if self.kind == "finite":
            if alphabet_size is None:
                return len(self.indices)
            return sum(1 for i in self.indices if i < alphabet_size)
        if alphabet_size is None:
            return None
        excluded = sum(1 for i in self.indices if i < alphabet_size)
        return alphabet_size - excluded

    def truncated(self, k: int, alphabet_size: int | None = None) -> "SupportSet":
        """The finite set of the first k enumerated members."""
        members = self.first_members(k, alphabet_size)
        if len(members) < k:
            raise ValueError(f"support set has only {len(members)} members, needed {k}")
        return SupportSet.finite(members)

    def to_spec(self) -> str:
        if self.kind == "all":
            return "all"
        joined = ",".join(str(i) for i in self.indices)
        return ("only:" if self.kind == "finite" else "exclude:") + joined
