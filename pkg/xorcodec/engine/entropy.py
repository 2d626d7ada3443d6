"""
Entropy limits of fixed-to-variable coding for small masked blocks.

A masked block of n_b bits with n_u unpruned positions can be represented
by any symbol that agrees with it on the unpruned positions. The smallest
symbol set covering every such block bounds fixed-to-fixed coding at
ceil(log2 |set|) bits, and the best assignment of blocks to symbols gives
the entropy H of a variable-length code.
"""

import itertools
import logging
import math
from collections import Counter
from dataclasses import dataclass
from typing import Any, Dict, List, Optional, Sequence, Tuple

from .exceptions import InvalidParameterError

logger = logging.getLogger(__name__)

MAX_BLOCK_BITS = 8
EXHAUSTIVE_ASSIGNMENT_LIMIT = 1 << 16
DEFAULT_NODE_BUDGET = 100_000
DEFAULT_ASSIGNMENT_BUDGET = 1 << 18
MAX_COVERS = 4096


class _BudgetExceeded(Exception):
    pass


class _Budget:
    """Work counter shared by every step of the assignment phase."""

    def __init__(self, limit: int):
        self.limit = limit
        self.used = 0

    def spend(self, amount: int = 1) -> None:
        if self.used + amount > self.limit:
            raise _BudgetExceeded
        self.used += amount


@dataclass(frozen=True)
class SymbolTable:
    """Symbol set with the occurrence probability of each symbol."""
    n_b: int
    n_u: int
    symbols: Tuple[int, ...]
    probabilities: Tuple[float, ...]
    H: float
    exact: bool = True

    def to_dict(self) -> Dict[str, Any]:
        return {
            'n_b': self.n_b,
            'n_u': self.n_u,
            'symbols': [format(s, f'0{self.n_b}b') for s in self.symbols],
            'probabilities': list(self.probabilities),
            'H': self.H,
            'fixed_to_fixed_bits': fixed_to_fixed_bits(self),
            'exact': self.exact,
        }


def _validate(n_b: int, n_u: int) -> None:
    if not 0 <= n_u <= n_b <= MAX_BLOCK_BITS:
        raise InvalidParameterError(
            f"Need 0 <= n_u <= n_b <= {MAX_BLOCK_BITS}, got n_b={n_b}, n_u={n_u}"
        )


def _masks(n_b: int, n_u: int) -> List[int]:
    return [sum(1 << p for p in positions) for positions in itertools.combinations(range(n_b), n_u)]


def _subsets(mask: int) -> List[int]:
    """All data patterns living on the set bits of ``mask``, ascending."""
    positions = [p for p in range(mask.bit_length()) if mask >> p & 1]
    patterns = []
    for value in range(1 << len(positions)):
        patterns.append(sum(1 << p for i, p in enumerate(positions) if value >> i & 1))
    return sorted(patterns)


def enumerate_masked_blocks(n_b: int, n_u: int) -> List[Tuple[int, int]]:
    """
    Every (mask, data) pair with popcount(mask) = n_u; data is zero off the mask.

    Blocks of one mask are contiguous, 2**n_u per mask.
    """
    _validate(n_b, n_u)
    return [(mask, data) for mask in _masks(n_b, n_u) for data in _subsets(mask)]


def compatible(symbol: int, block: Tuple[int, int]) -> bool:
    mask, data = block
    return (symbol ^ data) & mask == 0


def pairwise_prefilter(symbols: Sequence[int], n_b: int, n_u: int) -> bool:
    """
    Necessary condition for a cover.

    With n_u >= 2 every pair of positions must show all four bit patterns
    across the symbols; with n_u = 1 every position must show both values.
    """
    if n_u == 0:
        return len(symbols) > 0
    if n_u == 1:
        return all({(s >> p) & 1 for s in symbols} == {0, 1} for p in range(n_b))
    for i, j in itertools.combinations(range(n_b), 2):
        if len({((s >> i) & 1, (s >> j) & 1) for s in symbols}) < 4:
            return False
    return True


def is_cover(symbols: Sequence[int], n_b: int, n_u: int) -> bool:
    """Whether every masked block is compatible with at least one symbol."""
    if not pairwise_prefilter(symbols, n_b, n_u):
        return False
    return all(any(compatible(s, block) for s in symbols) for block in enumerate_masked_blocks(n_b, n_u))


class _CoverSearch:
    """Iterative-deepening exact set cover over block bitsets."""

    def __init__(self, n_b: int, n_u: int, node_budget: int):
        self.n_b = n_b
        self.n_u = n_u
        self.blocks = enumerate_masked_blocks(n_b, n_u)
        self.group_size = 1 << n_u
        self.groups = len(self.blocks) // self.group_size
        self.full = (1 << len(self.blocks)) - 1
        self.symbol_cover = [
            sum(1 << i for i, block in enumerate(self.blocks) if compatible(s, block))
            for s in range(1 << n_b)
        ]
        self.block_symbols = [
            [s for s in range(1 << n_b) if compatible(s, block)] for block in self.blocks
        ]
        self.node_budget = node_budget
        self.nodes = 0

    def bound(self, uncovered: int) -> int:
        """Each mask still needs one new symbol per uncovered pattern."""
        group_mask = (1 << self.group_size) - 1
        return max(
            ((uncovered >> (g * self.group_size)) & group_mask).bit_count() for g in range(self.groups)
        )

    def covers_of_size(self, k: int) -> List[Tuple[int, ...]]:
        found = set()

        def dfs(chosen: List[int], covered: int):
            self.nodes += 1
            if self.nodes > self.node_budget:
                raise _BudgetExceeded
            uncovered = self.full & ~covered
            if uncovered == 0:
                found.add(tuple(sorted(chosen)))
                return
            if len(found) >= MAX_COVERS or len(chosen) + self.bound(uncovered) > k:
                return
            first = (uncovered & -uncovered).bit_length() - 1
            for s in self.block_symbols[first]:
                if s not in chosen:
                    chosen.append(s)
                    dfs(chosen, covered | self.symbol_cover[s])
                    chosen.pop()

        # Covers are closed under XOR translation, so symbol 0 can be fixed
        dfs([0], self.symbol_cover[0])
        return sorted(found)

    def greedy_cover(self) -> Tuple[int, ...]:
        chosen = [0]
        covered = self.symbol_cover[0]
        while covered != self.full:
            uncovered = self.full & ~covered
            best = max(
                range(1 << self.n_b),
                key=lambda s: ((self.symbol_cover[s] & uncovered).bit_count(), -s),
            )
            chosen.append(best)
            covered |= self.symbol_cover[best]
        return tuple(sorted(chosen))


def _entropy(counts: Sequence[int]) -> float:
    total = sum(counts)
    return 0.0 - sum((c / total) * math.log2(c / total) for c in counts if c)


def _options(symbols: Sequence[int], blocks: Sequence[Tuple[int, int]]) -> List[List[int]]:
    return [[i for i, s in enumerate(symbols) if compatible(s, block)] for block in blocks]


def _split_fixed(options: List[List[int]], k: int) -> Tuple[List[int], Counter]:
    """Counts of single-option blocks, and the free option lists with their multiplicity."""
    counts = [0] * k
    free: Counter = Counter()
    for opts in options:
        if len(opts) == 1:
            counts[opts[0]] += 1
        else:
            free[tuple(opts)] += 1
    return counts, free


def assignment_leaves(options: List[List[int]]) -> int:
    """
    Leaves of the exhaustive assignment search.

    Blocks with the same option list are interchangeable, so each group of
    m blocks over r symbols contributes C(m + r - 1, r - 1) count splits.
    """
    free = Counter(tuple(opts) for opts in options if len(opts) > 1)
    return math.prod(math.comb(m + len(opts) - 1, len(opts) - 1) for opts, m in free.items())


def _splits(total: int, parts: int):
    if parts == 1:
        yield (total,)
        return
    for first in range(total, -1, -1):
        for rest in _splits(total - first, parts - 1):
            yield (first,) + rest


def _exhaustive_assignment(options: List[List[int]], k: int, budget: Optional[_Budget] = None) -> List[int]:
    counts, free = _split_fixed(options, k)
    groups = sorted(free.items())
    if budget is not None:
        budget.spend(assignment_leaves(options))

    best = {'H': math.inf, 'counts': list(counts)}

    def dfs(g: int):
        if g == len(groups):
            h = _entropy(counts)
            if h < best['H'] - 1e-12:
                best['H'], best['counts'] = h, list(counts)
            return
        opts, m = groups[g]
        for split in _splits(m, len(opts)):
            for s, c in zip(opts, split):
                counts[s] += c
            dfs(g + 1)
            for s, c in zip(opts, split):
                counts[s] -= c

    dfs(0)
    return best['counts']


def _plogp(c: int) -> float:
    return c * math.log2(c) if c > 1 else 0.0


def _local_search_assignment(options: List[List[int]], k: int, budget: Optional[_Budget] = None) -> List[int]:
    """Single-block moves while they lower the entropy; each move is scored in O(1)."""
    popularity = Counter(s for opts in options for s in opts)
    assignment = [max(opts, key=lambda s: (popularity[s], -s)) for opts in options]
    counts = [0] * k
    for s in assignment:
        counts[s] += 1

    # Lower entropy at fixed total means a larger sum of c*log2(c)
    work = sum(len(opts) for opts in options)
    improved = True
    while improved:
        improved = False
        if budget is not None:
            budget.spend(work)
        for i, opts in enumerate(options):
            a = assignment[i]
            for s in opts:
                if s == a:
                    continue
                gain = (_plogp(counts[a] - 1) - _plogp(counts[a])
                        + _plogp(counts[s] + 1) - _plogp(counts[s]))
                if gain > 1e-12:
                    counts[a] -= 1
                    counts[s] += 1
                    assignment[i] = a = s
                    improved = True
    return counts


def best_assignment(symbols: Sequence[int], n_b: int, n_u: int) -> Tuple[List[int], bool]:
    """
    Assign each masked block to a compatible symbol minimizing entropy.

    Returns:
        (block count per symbol, whether the search was exhaustive)
    """
    options = _options(symbols, enumerate_masked_blocks(n_b, n_u))
    if any(not opts for opts in options):
        raise InvalidParameterError("Symbol set does not cover every masked block")
    if assignment_leaves(options) <= EXHAUSTIVE_ASSIGNMENT_LIMIT:
        return _exhaustive_assignment(options, len(symbols)), True
    return _local_search_assignment(options, len(symbols)), False


def _rank_covers(
    covers: Sequence[Tuple[int, ...]],
    blocks: Sequence[Tuple[int, int]],
    budget: _Budget,
) -> Tuple[Tuple[float, Tuple[int, ...], List[int]], bool]:
    """
    Lowest-entropy assignment over the given covers.

    Every cover is scored by local search first, then covers are refined
    exhaustively from the most promising one while the budget lasts. The
    flag is True only when every cover was refined.
    """
    scored = []
    complete = True
    for i, cover in enumerate(covers):
        options = _options(cover, blocks)
        try:
            counts = _local_search_assignment(options, len(cover), budget if i else None)
        except _BudgetExceeded:
            complete = False
            break
        scored.append((_entropy(counts), cover, counts, options))
    scored.sort(key=lambda item: (item[0], item[1]))

    best = scored[0][:3]
    for _, cover, _, options in scored:
        try:
            counts = _exhaustive_assignment(options, len(cover), budget)
        except _BudgetExceeded:
            # Leaves are charged up front, so a smaller cover may still fit
            complete = False
            continue
        h = _entropy(counts)
        if h < best[0] - 1e-12 or (abs(h - best[0]) <= 1e-12 and cover < best[1]):
            best = (h, cover, counts)
    return best, complete


def min_symbol_set(
    n_b: int,
    n_u: int,
    node_budget: int = DEFAULT_NODE_BUDGET,
    assignment_budget: int = DEFAULT_ASSIGNMENT_BUDGET,
) -> SymbolTable:
    """
    Smallest covering symbol set with its entropy-minimizing assignment.

    Among all minimum-size covers found, the one with the lowest entropy
    wins (ties: smallest sorted symbol tuple). Blocks are weighted
    uniformly over enumerate_masked_blocks. When the exact cover search
    runs out of ``node_budget`` a greedy cover is used; when the assignment
    phase runs out of ``assignment_budget`` the best assignment found so
    far is kept. Either way ``exact`` is False.
    """
    _validate(n_b, n_u)
    search = _CoverSearch(n_b, n_u, node_budget)
    total_blocks = len(search.blocks)

    covers: List[Tuple[int, ...]] = []
    exact = True
    try:
        for k in range(1 << n_u, (1 << n_b) + 1):
            covers = search.covers_of_size(k)
            if covers:
                break
        if len(covers) >= MAX_COVERS:
            exact = False
    except _BudgetExceeded:
        logger.warning(
            f"Exact cover search for n_b={n_b}, n_u={n_u} exceeded {node_budget} nodes, using greedy cover"
        )
        covers = [search.greedy_cover()]
        exact = False

    budget = _Budget(assignment_budget)
    (h, cover, counts), complete = _rank_covers(covers, search.blocks, budget)
    if not complete:
        logger.warning(
            f"Assignment search for n_b={n_b}, n_u={n_u} exceeded {assignment_budget} steps "
            f"over {len(covers)} covers, keeping the best assignment found"
        )
    exact = exact and complete

    table = SymbolTable(
        n_b=n_b,
        n_u=n_u,
        symbols=cover,
        probabilities=tuple(c / total_blocks for c in counts),
        H=h,
        exact=exact,
    )
    logger.info(
        f"Symbol set for n_b={n_b}, n_u={n_u}: {len(cover)} symbols, H={h:.4f}, exact={exact}"
    )
    return table



def fixed_to_fixed_bits(table: SymbolTable) -> int:
    """Bits of a fixed-length index into the symbol set."""
    return (len(table.symbols) - 1).bit_length()
