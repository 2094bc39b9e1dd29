"""Smoke test for the certilin extension module.

Build and install first:  pip install --no-build-isolation -e crates/py
"""

import sys

import certilin

P = 1_000_003


def det(entries, n, p=P):
    m = [[0] * n for _ in range(n)]
    for i, j, x in entries:
        m[i][j] = x
    d = 1
    for c in range(n):
        r = next((r for r in range(c, n) if m[r][c]), None)
        if r is None:
            return 0
        if r != c:
            m[r], m[c] = m[c], m[r]
            d = -d
        d = d * m[c][c] % p
        inv = pow(m[c][c], p - 2, p)
        for r in range(c + 1, n):
            k = m[r][c] * inv % p
            m[r] = [(a - k * b) % p for a, b in zip(m[r], m[c])]
    return d % p


def check(name, ok, detail=""):
    print(f"{name}: {'ok' if ok else 'FAILED'} {detail}".rstrip())
    return ok


def main():
    results = []
    m = next(x for s in range(100) if det((x := certilin.Matrix.random(10, 0.3, P, s)).entries(), 10))
    want = det(m.entries(), 10)

    s = m.prove("det-gamma", seed=1)
    results.append(check("det-gamma", s.status == "accept" and s.determinant == want, f"det={s.determinant}"))
    v = m.verify(s.transcript())
    results.append(check("replay", v.status == "accept" and v.determinant == want, repr(v)))

    text = s.transcript().replace("prover ", "prover  ", 1)
    results.append(check("tampered", m.verify(text).status == "reject"))

    other = certilin.Matrix.random(10, 0.3, P, 999)
    try:
        other.verify(s.transcript())
        results.append(check("foreign matrix", False))
    except certilin.DigestMismatch:
        results.append(check("foreign matrix", True))

    f = certilin.Matrix.identity(10).prove("minpoly").polynomial
    results.append(check("identity minpoly", f == [P - 1, 1], str(f)))

    cp = m.prove("charpoly", seed=2).polynomial
    results.append(check("charpoly", cp == m.charpoly() and (-1) ** 10 * cp[0] % P == want))

    try:
        certilin.Matrix.random(10, 0.3, 11).prove("minpoly")
        results.append(check("small field", False))
    except certilin.FieldTooSmall as e:
        results.append(check("small field", "48" in str(e)))

    caught = sum(m.run("fauv", seed=k, strategy="wrong_generator").status != "accept" for k in range(100))
    results.append(check("wrong generator caught", caught == 100, f"{caught}/100"))

    g, phi, psi = certilin.xgcd(P, [P - 1, 0, 1], [P - 1, 1])
    results.append(check("xgcd", g == [P - 1, 1] and psi == [1], str((g, phi, psi))))

    return 0 if all(results) else 1


if __name__ == "__main__":
    sys.exit(main())
