"""Odd-even transposition swap network on a line of wires."""
from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import Sequence


@dataclass(frozen=True)
class SwapNetwork:
    """``n`` parallel layers of adjacent-wire swaps.

    Layer ``l`` acts on wire pairs ``(i, i+1)`` with ``i % 2 == l % 2``. Running
    every layer meets each unordered pair of labels exactly once and leaves the
    labels in reversed order.
    """

    n: int
    layers: tuple[tuple[tuple[int, int], ...], ...]

    @property
    def num_swaps(self) -> int:
        return sum(len(layer) for layer in self.layers)

    @property
    def depth(self) -> int:
        """Number of non-empty layers."""
        return sum(1 for layer in self.layers if layer)

    def permutations(self, layout: Sequence[int] | None = None) -> list[tuple[int, ...]]:
        """Wire-to-label layouts before the first layer and after each layer."""
        cur = list(range(self.n) if layout is None else layout)
        out = [tuple(cur)]
        for layer in self.layers:
            for w, v in layer:
                cur[w], cur[v] = cur[v], cur[w]
            out.append(tuple(cur))
        return out

    def meet_sequence(self, layout: Sequence[int]) -> list[tuple[int, tuple[int, int], tuple[int, int]]]:
        """``(layer, (w, w+1), (a, b))`` for every swap, with labels ``a < b`` met there."""
        cur = list(layout)
        out = []
        for ell, layer in enumerate(self.layers):
            for w, v in layer:
                a, b = cur[w], cur[v]
                out.append((ell, (w, v), (min(a, b), max(a, b))))
                cur[w], cur[v] = b, a
        return out

    def final_layout(self, layout: Sequence[int]) -> tuple[int, ...]:
        return self.permutations(layout)[-1]


@lru_cache(maxsize=None)
def build_swap_network(n: int) -> SwapNetwork:
    if n < 2:
        raise ValueError(f"swap network needs n >= 2, got {n}")
    layers = tuple(
        tuple((i, i + 1) for i in range(ell % 2, n - 1, 2))
        for ell in range(n)
    )
    return SwapNetwork(n, layers)
