"""Generators, determining residuals, and the builtin symmetry catalog."""

from __future__ import annotations

import random

import pytest

from conftest import random_poly_expr
from lieconserve.expr import U_X, ZERO, is_zero, normalize, parse
from lieconserve.jet_calculus import EvolutionSpec, SpecError
from lieconserve.symmetry import (Generator, burgers_catalog,
                                  determining_residual_generic,
                                  determining_residual_pair,
                                  prolongation_residual, scale_generator)

BURGERS = EvolutionSpec.quasilinear(parse("a(u)"), ZERO)


def test_catalog_has_the_expected_labels():
    labels = [g.name for g in burgers_catalog()]
    assert labels == ["X1", "X2", "X3", "X4", "X5", "X6", "X7", "X8", "Xf"]


def test_every_catalog_generator_satisfies_the_determining_pair():
    for g in burgers_catalog():
        r1, r2 = determining_residual_pair(BURGERS, g)
        assert r1 == ZERO, g.name
        assert r2 == ZERO, g.name


def test_the_u_dependent_family_is_present():
    family = burgers_catalog()[-1]
    # tau and xi are arbitrary functions of u, eta vanishes
    assert family.tau == parse("tau(u)")
    assert family.xi == parse("xi(u)")
    assert family.eta == ZERO


@pytest.mark.parametrize("lam", ["u", "u^2", "1 + u^3"])
def test_scaling_by_a_u_multiplier_preserves_symmetry(lam):
    for g in burgers_catalog():
        scaled = scale_generator(parse(lam), g)
        r1, r2 = determining_residual_pair(BURGERS, scaled)
        for r in (r1, r2):
            assert r == ZERO or is_zero(r).zero, (lam, g.name)


def test_scaled_generator_names_record_the_multiplier():
    g = scale_generator(parse("u^2"), burgers_catalog()[2])
    assert g.name == "(u^2)*X3"


def test_plain_u_translation_is_not_a_symmetry():
    bad = Generator(ZERO, ZERO, parse("1"))
    r1, r2 = determining_residual_pair(BURGERS, bad)
    # R2 picks up alpha_u * eta = a'(u)
    assert r2 == parse("a'(u)")
    verdict = is_zero(r2)
    assert not verdict.zero and verdict.witness is not None


def test_x_scaling_alone_is_not_a_symmetry():
    bad = Generator(ZERO, parse("x"), ZERO)
    r1, r2 = determining_residual_pair(BURGERS, bad)
    assert r1 == ZERO
    assert r2 == parse("-a(u)")
    assert not is_zero(r2).zero


def test_pair_requires_a_quasilinear_flux():
    with pytest.raises(SpecError):
        determining_residual_pair(EvolutionSpec.generic(parse("u_x^2")),
                                  burgers_catalog()[0])


def test_generic_residual_agrees_with_prolongation_machinery():
    rng = random.Random(1129)
    specs = [BURGERS,
             EvolutionSpec.quasilinear(parse("x*u"), parse("u^2")),
             EvolutionSpec.generic(parse("a(u)*u_x + q(x)"))]
    for spec in specs:
        for _ in range(5):
            g = Generator(random_poly_expr(rng), random_poly_expr(rng),
                          random_poly_expr(rng))
            direct = determining_residual_generic(spec, g)
            prolonged = prolongation_residual(spec, g)
            assert direct == prolonged or is_zero(direct - prolonged).zero


def test_generic_residual_decomposes_into_the_pair():
    rng = random.Random(5150)
    for _ in range(10):
        alpha = random_poly_expr(rng)
        beta = random_poly_expr(rng)
        spec = EvolutionSpec.quasilinear(alpha, beta)
        g = Generator(random_poly_expr(rng), random_poly_expr(rng),
                      random_poly_expr(rng))
        whole = determining_residual_generic(spec, g)
        r1, r2 = determining_residual_pair(spec, g)
        recombined = normalize(r1 + U_X * r2)
        assert whole == recombined


def test_generator_components_must_stay_within_point_scope():
    with pytest.raises(SpecError):
        Generator(parse("u_x"), ZERO, ZERO)
    with pytest.raises(SpecError):
        Generator(ZERO, ZERO, parse("v"))


def test_generator_string_rendering_drops_zero_components():
    g = Generator(parse("t^2"), parse("t*x"), ZERO, "X7")
    s = str(g)
    assert "d/dt" in s and "d/dx" in s and "d/du" not in s
