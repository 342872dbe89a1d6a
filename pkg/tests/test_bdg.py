import itertools

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from anyonsim.bdg import (
    CHI_PLUS_Y,
    SIGMA_Y,
    ChainSpec,
    MassProfile,
    bdg_matrix,
    bulk_gap,
    chain_spectrum,
    end_weight,
    jr_dispersion,
    jr_zero_mode,
    kitaev_decay_length,
    splitting_scan,
)
from anyonsim.errors import DegenerateFit, InputError, NotNormalizable
from anyonsim.ising import build_algebra


@pytest.mark.parametrize(
    "k,m,v,expected",
    [(0.0, 1.0, 1.0, 1.0), (0.75, 1.0, 4 / 3, np.sqrt(2)), (2.0, 0.0, 1.5, 3.0), (-2.0, 0.0, 1.5, 3.0)],
)
def test_jr_dispersion(k, m, v, expected):
    up, down = jr_dispersion(k, m, v)
    assert abs(up - expected) < 1e-15 and abs(down + expected) < 1e-15


def test_chi_plus_y_is_eigenvector():
    assert np.allclose(SIGMA_Y @ CHI_PLUS_Y, CHI_PLUS_Y, atol=1e-15)


def test_zero_mode_residual_small():
    z = jr_zero_mode(MassProfile.tanh(spacing=0.01))
    assert z.residual < 1e-3
    assert abs(np.linalg.norm(z.spinor) - 1) < 1e-12


def test_zero_mode_residual_second_order():
    res = [jr_zero_mode(MassProfile.tanh(spacing=a)).residual for a in (0.04, 0.02, 0.01, 0.005)]
    ratios = [a / b for a, b in zip(res, res[1:])]
    assert all(3.6 < r < 4.4 for r in ratios), ratios


def test_zero_mode_spinor_everywhere():
    z = jr_zero_mode(MassProfile.tanh(spacing=0.01))
    amp = z.spinor @ CHI_PLUS_Y.conj()
    assert np.all(amp.real >= 0)
    rel = np.linalg.norm(z.spinor - amp[:, None] * CHI_PLUS_Y, axis=1) / np.linalg.norm(z.spinor, axis=1)
    assert np.max(rel) < 1e-12


@pytest.mark.parametrize("m_bar,width", [(1.0, 1.0), (2.0, 0.5), (0.5, 2.0)])
def test_zero_mode_density_matches_closed_form(m_bar, width):
    # int_0^x -M tanh(s/w) ds = -M w ln cosh(x/w); trapezoid error is O(a^2)
    prof = MassProfile.tanh(m_bar, width, half_length=30.0, spacing=0.005)
    z = jr_zero_mode(prof)
    exact = np.cosh(prof.x / width) ** (-2 * m_bar * width)
    exact /= exact.sum()
    assert np.max(np.abs(z.density - exact)) < 2e-5 * exact.max()
    assert abs(prof.x[np.argmax(z.density)]) < 1e-9


def test_step_and_custom_profiles():
    x = np.linspace(-15, 15, 3001)
    step = jr_zero_mode(MassProfile("step", 1.0, x), v_f=2.0)
    # exp(-|x|/2) envelope, so the density decays as exp(-|x|)
    d = step.density
    i0 = np.argmax(d)
    assert abs(np.log(d[i0] / d[i0 + 500]) - 5.0) < 0.02
    custom = jr_zero_mode(MassProfile("custom", 1.0, x, samples=-np.tanh(x)))
    tanh = jr_zero_mode(MassProfile("tanh", 1.0, x))
    assert np.allclose(custom.spinor, tanh.spinor)


def test_zero_mode_needs_declared_asymptotics():
    x = np.linspace(-10, 10, 201)
    with pytest.raises(NotNormalizable):
        jr_zero_mode(MassProfile("custom", 1.0, x, samples=np.tanh(x)))
    with pytest.raises(NotNormalizable):
        jr_zero_mode(MassProfile("custom", 1.0, x, samples=np.ones_like(x)))


def test_mass_profile_validation():
    with pytest.raises(InputError):
        MassProfile("tanh", 1.0, [0.0, 1.0, 3.0])
    with pytest.raises(InputError):
        MassProfile("gauss", 1.0, np.linspace(0, 1, 5))
    with pytest.raises(InputError):
        MassProfile("tanh", -1.0, np.linspace(0, 1, 5))


def _many_body_excitations(spec):
    """Excitation energies of the chain Hamiltonian on the full Fock space."""
    n, t, d = spec.n_sites, spec.t, spec.delta
    mu = spec.mu_array()
    alg = build_algebra(2 * n)
    c = [(alg.gamma(2 * j + 1) + 1j * alg.gamma(2 * j + 2)) / 2 for j in range(n)]
    cd = [x.conj().T for x in c]
    h = sum((2 * t - mu[j]) * cd[j] @ c[j] for j in range(n))
    for j in range(n - 1):
        h = h - t * (cd[j] @ c[j + 1] + cd[j + 1] @ c[j]) + d * (cd[j] @ cd[j + 1] + c[j + 1] @ c[j])
    e = np.linalg.eigvalsh(h)
    return e - e[0]


@pytest.mark.parametrize(
    "spec",
    [
        ChainSpec(4, 1.0, 0.3, [0.7, 1.3, -0.2, 0.9]),
        ChainSpec(5, 1.0, 0.5, 1.0),
        ChainSpec(4, 2.0, 0.0, -0.5),
    ],
)
def test_bdg_matches_many_body(spec):
    e = chain_spectrum(spec).eigenvalues
    pos = e[e > 1e-12]
    pos = np.concatenate([pos, np.zeros(spec.n_sites - pos.size)])
    sums = sorted(sum(s) for r in range(spec.n_sites + 1) for s in itertools.combinations(pos, r))
    assert np.max(np.abs(np.array(sums) - _many_body_excitations(spec))) < 1e-12


def test_sweet_spot_flat_bands():
    e = chain_spectrum(ChainSpec(20, 1.0, 1.0, 2.0)).eigenvalues
    assert np.allclose(np.sort(np.abs(e)), [0, 0] + [2] * 38, atol=1e-12)


chain_specs = st.builds(
    lambda n, t, d, mus: ChainSpec(n, t, d, mus[:n]),
    st.integers(4, 40),
    st.floats(0.2, 3.0),
    st.floats(0.0, 2.0),
    st.lists(st.floats(-3, 5), min_size=40, max_size=40),
)


@settings(max_examples=40, deadline=None)
@given(chain_specs)
def test_particle_hole_symmetry(spec):
    r = chain_spectrum(spec)
    assert r.ph_defect < 1e-10 * spec.t
    h = bdg_matrix(spec)
    assert np.array_equal(h, h.T)


def test_topological_chain_end_modes():
    spec = ChainSpec(200, 1.0, 0.5, 1.0)
    r = chain_spectrum(spec)
    zero = np.flatnonzero(np.abs(r.eigenvalues) < 1e-6)
    assert zero.size == 2 and len(r.near_zero) == 2
    xi = kitaev_decay_length(1.0, 0.5, 1.0)
    for i in zero:
        assert end_weight(r.eigenvectors[:, i], 200, 5 * xi) > 0.99
    centers = sorted(m.center for m in r.near_zero)
    assert centers[0] < 5 and centers[1] > 195


def test_trivial_chain_is_gapped():
    r = chain_spectrum(ChainSpec(200, 1.0, 0.5, -0.5))
    assert not r.near_zero
    assert np.min(np.abs(r.eigenvalues)) >= bulk_gap(1.0, 0.5, -0.5) - 1e-12


@pytest.mark.parametrize(
    "delta,mu,expected",
    [
        # complex roots: |x|^2 = (t - D)/(t + D) = 1/3 whatever mu is
        (0.5, 1.0, 2 / np.log(3)),
        (0.5, 2.0, 2 / np.log(3)),
        # real roots of 1.5 x^2 - 1.9 x + 0.5
        (0.5, 0.1, -1 / np.log((1.9 + np.sqrt(0.61)) / 3)),
        (1.0, 2.0, 0.0),
    ],
)
def test_kitaev_decay_length(delta, mu, expected):
    assert abs(kitaev_decay_length(1.0, delta, mu) - expected) < 1e-12


def test_decay_length_infinite_in_trivial_phase():
    assert kitaev_decay_length(1.0, 0.5, -0.5) == float("inf")


def test_splitting_scan_continuum_regime():
    s = splitting_scan(ChainSpec(4, 1.0, 0.5, 0.05), range(20, 241, 20))
    assert s.r_squared > 0.98
    assert abs(s.xi_fit - s.xi_guide) / s.xi_guide < 0.25
    assert np.all(np.diff(s.ln_envelope) <= 1e-12)
    assert s.xi_guide == 20.0


def test_splitting_reaches_numerical_zero():
    s = splitting_scan(ChainSpec(4, 1.0, 0.5, 0.5), [10, 20, 30, 40, 60])
    assert s.epsilon[-1] < 1e-8


def test_splitting_scan_too_few_points():
    with pytest.raises(DegenerateFit):
        splitting_scan(ChainSpec(4, 1.0, 0.5, 0.05), [20, 40])
    with pytest.raises(DegenerateFit):
        splitting_scan(ChainSpec(4, 1.0, 0.5, 0.05), [])


def test_splitting_scan_parallel_is_identical():
    a = splitting_scan(ChainSpec(4, 1.0, 0.5, 0.1), range(10, 121, 10), workers=1)
    b = splitting_scan(ChainSpec(4, 1.0, 0.5, 0.1), range(10, 121, 10), workers=4)
    assert np.array_equal(a.epsilon, b.epsilon) and a.xi_fit == b.xi_fit


def test_chain_spec_validation():
    with pytest.raises(InputError):
        ChainSpec(3)
    with pytest.raises(InputError):
        ChainSpec(10, t=0.0)
    with pytest.raises(InputError):
        ChainSpec(5, mu=[1.0, 2.0])
