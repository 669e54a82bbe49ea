"""Walk through a two-sided normal form by hand, degree by degree."""

from jetnorm import GroupKind, check_pde, normal_form, parse_poly_matrix, v_space, verify_certificate, w_complement

NAMES = ["x", "y"]
ORDER = 4


def main() -> None:
    A = parse_poly_matrix("[x + y^2 + x*y^2, y + x^3; x^2*y, x - 2*y^3]", NAMES, ORDER)
    print("input:      ", A.to_text(NAMES))
    r = normal_form(A, GroupKind.TWO_SIDED)
    for j in range(1, ORDER + 1):
        V = v_space(r.B, GroupKind.TWO_SIDED, j)
        print(f"degree {j}: dim V = {V.dim:3d}  dim W = {w_complement(V).dim:3d}")
    print("normal form:", r.B.to_text(NAMES))
    print("certificate:", bool(verify_certificate(r)))
    print("relations at k=1:", check_pde(r.B, 1, GroupKind.TWO_SIDED).passed)


if __name__ == "__main__":
    main()
