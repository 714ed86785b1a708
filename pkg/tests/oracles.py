"""Reference implementations used as test oracles.

Each one is written from the behavioural rules alone, with numpy and the
standard library, and shares no code with the package under test.
"""

import hashlib
import re

import numpy as np


def hashed_bow(text: str, dim: int = 384) -> np.ndarray:
    """Signed hashed bag-of-words, L2-normalised."""
    vec = np.zeros(dim)
    for word in re.findall(r"[a-z0-9]+", text.lower()):
        h = int.from_bytes(hashlib.blake2b(word.encode(), digest_size=8).digest(), "big")
        vec[h % dim] += -1.0 if h >> 63 else 1.0
    return vec / np.linalg.norm(vec)


def cosine(a, b) -> float:
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    return float(a @ b / (np.linalg.norm(a) * np.linalg.norm(b)))


def brute_force_top_k(chunks, query, k):
    """[(id, score)] by full sort; ties keep corpus order."""
    scored = [(cosine(emb, query), pos, cid) for pos, (cid, emb) in enumerate(chunks)]
    scored.sort(key=lambda t: (-t[0], t[1]))
    return [(cid, s) for s, _, cid in scored[:k]]


_OPAQUE = re.compile(r'"(?:\\.|[^"\\\n])*"|\'(?:\\.|[^\'\\\n])*\'|//[^\n]*|/\*.*?\*/', re.S)


def rename_locals(code: str, names, new_names) -> str:
    """Whole-token rename of the listed locals, skipping member/scope uses.

    String and character literals and comments are left as they are.
    """
    if not names:
        return code
    table = dict(zip(names, new_names))
    pattern = re.compile(r"(?<![\w.:>])(" + "|".join(map(re.escape, names)) + r")\b(?!::)")
    out, pos = [], 0
    for m in _OPAQUE.finditer(code):
        out.append(pattern.sub(lambda t: table[t.group(1)], code[pos:m.start()]))
        out.append(m.group(0))
        pos = m.end()
    out.append(pattern.sub(lambda t: table[t.group(1)], code[pos:]))
    return "".join(out)


def normalize_by_list(code: str, locals_in_order) -> str:
    return rename_locals(code, locals_in_order,
                         [f"VAR{n}" for n in range(1, len(locals_in_order) + 1)])


def step_score(generated, gen_locals, reference, ref_locals, dim=384) -> float:
    g = normalize_by_list(generated, gen_locals)
    r = normalize_by_list(reference, ref_locals)
    return cosine(hashed_bow(g, dim), hashed_bow(r, dim))


def replace_lines(text: str, start: int, end: int, replacement: str) -> str:
    """Replace 1-based lines [start, end] of text with replacement."""
    lines = text.split("\n")
    has_final_nl = text.endswith("\n")
    if has_final_nl:
        lines = lines[:-1]
    repl = replacement[:-1] if replacement.endswith("\n") else replacement
    out = lines[:start - 1] + [repl] + lines[end:]
    return "\n".join(out) + ("\n" if has_final_nl else "")
