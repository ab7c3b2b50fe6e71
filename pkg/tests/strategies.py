from hypothesis import strategies as st

from nonconvex.constellation import from_offsets

SMALL_PRIMES = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53, 59, 61]


def brute_admissible(offsets):
    """Some residue class mod q is missed for every prime q <= span + 1."""
    for q in SMALL_PRIMES:
        if q > offsets[-1] + 1:
            break
        if all(any((r + h) % q == 0 for h in offsets) for r in range(q)):
            return False
    return True


@st.composite
def offset_lists(draw, max_span=60, min_len=2, max_len=12):
    span = draw(st.integers(1, max_span))
    inner = draw(st.sets(st.integers(1, max(1, span - 1)), max_size=max_len - 2))
    return sorted({0, span} | {h for h in inner if 0 < h < span})


constellations = offset_lists().map(from_offsets)
admissible_offsets = offset_lists().filter(brute_admissible)
admissible_constellations = admissible_offsets.map(from_offsets)
