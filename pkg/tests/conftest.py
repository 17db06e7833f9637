import random
import sys
from pathlib import Path

from hypothesis import HealthCheck, settings
from hypothesis import strategies as st

from opcouple.fuzz import random_eae_pair
from opcouple.ratmat import RatMatrix

sys.path.insert(0, str(Path(__file__).parent))

settings.register_profile(
    "repo",
    deadline=None,
    max_examples=60,
    derandomize=True,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("repo")


@st.composite
def matrices(draw, max_rows: int = 4, max_cols: int = 4, bound: int = 3, rows: int | None = None, cols: int | None = None):
    m = draw(st.integers(0, max_rows)) if rows is None else rows
    n = draw(st.integers(0, max_cols)) if cols is None else cols
    entries = draw(st.lists(st.lists(st.integers(-bound, bound), min_size=n, max_size=n), min_size=m, max_size=m))
    return RatMatrix.from_rows(entries, cols=n)


@st.composite
def square_matrices(draw, max_dim: int = 4, bound: int = 3):
    n = draw(st.integers(0, max_dim))
    return draw(matrices(rows=n, cols=n, bound=bound))


@st.composite
def eae_pairs(draw, max_dim: int = 5):
    seed = draw(st.integers(0, 2**32 - 1))
    return random_eae_pair(random.Random(seed), max_dim, 2)


@st.composite
def rectangular_eae_pairs(draw, max_dim: int = 4):
    """Pairs ``P diag(core, 0) Q`` of possibly different, non-square shapes."""
    from opcouple.ratmat import diag, random_rank_from_rng, random_unimodular, zeros

    rng = random.Random(draw(st.integers(0, 2**32 - 1)))
    k = draw(st.integers(0, max_dim))
    c = draw(st.integers(0, max_dim))
    a = draw(st.integers(0, max_dim))
    b = draw(st.integers(0, max_dim))

    def build(r: int) -> RatMatrix:
        core = random_rank_from_rng(rng, r, r, r, 2)
        return random_unimodular(rng, r + c, 2) @ diag(core, zeros(c, k)) @ random_unimodular(rng, r + k, 2)

    return build(a), build(b)
