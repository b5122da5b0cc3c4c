"""Complex literal syntax shared by the catalog text format and the diffpoly grammar.

Accepted forms: ``a``, ``bi``, ``a+bi``, ``a-bi``, ``i``, ``-i``, with ``a`` and
``b`` in ordinary float syntax (``1``, ``-2.5``, ``1e-3``).
"""

import math
import re

NUM = r"(?:\d+(?:\.\d*)?|\.\d+)(?:[eE][+-]?\d+)?"
COMPLEX = rf"[+-]?(?:{NUM})?i|[+-]?{NUM}(?:[+-](?:{NUM})?i)?"
_COMPLEX_RE = re.compile(COMPLEX)


def parse_complex(text):
    s = text.strip().replace(" ", "")
    if not _COMPLEX_RE.fullmatch(s):
        raise ValueError(f"not a complex literal: {text!r}")
    if not s.endswith("i"):
        return complex(float(s), 0.0)
    body = s[:-1]
    # split off the imaginary coefficient at the last sign not inside an exponent
    cut = None
    for k in range(len(body) - 1, 0, -1):
        if body[k] in "+-" and body[k - 1] not in "eE":
            cut = k
            break
    if cut is None:
        re_part, im_part = "", body
    else:
        re_part, im_part = body[:cut], body[cut:]
    if im_part in ("", "+"):
        im = 1.0
    elif im_part == "-":
        im = -1.0
    else:
        im = float(im_part)
    return complex(float(re_part) if re_part else 0.0, im)


def format_real(x, digits=None):
    x = float(x)
    if x == 0.0:
        return "0"
    if digits is not None:
        return f"{x:.{digits}g}"
    if x.is_integer() and abs(x) < 1e15:
        return str(int(x))
    return repr(x)


def format_complex(z, digits=None):
    """Render ``z`` so that :func:`parse_complex` gives back the same value."""
    z = complex(z)
    re_, im = z.real, z.imag
    if math.isnan(re_) or math.isnan(im) or math.isinf(re_) or math.isinf(im):
        raise ValueError(f"cannot render non-finite complex {z!r}")
    if im == 0.0:
        return format_real(re_, digits)
    if im == 1.0:
        im_s = "i"
    elif im == -1.0:
        im_s = "-i"
    else:
        im_s = format_real(im, digits) + "i"
    if re_ == 0.0:
        return im_s
    sep = "" if im_s.startswith("-") else "+"
    return format_real(re_, digits) + sep + im_s
