"""Reflection factor against the flow angle: exact derivative, slope-ratio form, finite difference.

    python3 scripts/reflection_table.py
"""
import numpy as np

from steadyfront.gas import GasModel, GasState
from steadyfront.riemann import reflect_at_boundary, reflection_coefficient, reflection_coefficient_angle_form


def main():
    model = GasModel()
    h = 1e-5
    print("v,exact,slope_ratio_form,finite_difference")
    for v in np.linspace(-0.1, 0.1, 11):
        left = GasState(2.0, float(v), 1.0, 1.0)
        fd = -(reflect_at_boundary(left, h, 1.0, model)[0] - reflect_at_boundary(left, -h, 1.0, model)[0]) / (2 * h)
        print(f"{v:+.2f},{reflection_coefficient(left, model):.6f},"
              f"{reflection_coefficient_angle_form(left, model):.6f},{fd:.6f}")


if __name__ == "__main__":
    main()
