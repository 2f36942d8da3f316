"""Tests for MI estimators, critic objectives, and the Q interface."""

import numpy as np
import pytest

from src.contracts.errors import ConfigError, InputError
from src.contracts.schemas import Method, SafeConvention
from src.contrastive import (
    CriticInputs,
    CriticLoss,
    CriticObjective,
    CriticScores,
    EncoderSet,
    binary_nce_grad,
    binary_nce_objective,
    bo_estimate,
    bo_grad,
    club_estimate,
    club_grad,
    critic_occupancy,
    crl_loss,
    infonce_grad,
    infonce_mi_estimate,
    infonce_objective,
    init_encoders,
    q_value,
    row_softmax,
    safe_loss,
    score_matrices,
)
from src.numerics import (
    Layer,
    ParamSet,
    finite_diff_check,
    mlp_backward,
    mlp_forward,
    mlp_forward_cached,
)


def _random_inputs(rng: np.random.Generator, b: int = 5, sd: int = 3, ad: int = 2) -> CriticInputs:
    visited = rng.normal(size=(b, sd))
    return CriticInputs(
        anchors=rng.normal(size=(b, sd + ad)),
        visited=visited,
        pairs=np.concatenate([visited, rng.normal(size=(b, sd))], axis=1),
    )


def _tanh_encoders(rng: np.random.Generator, sd: int = 3, ad: int = 2, e: int = 4) -> EncoderSet:
    return init_encoders(sd, ad, e, (6,), rng, activation="tanh")


def _constant_net(in_dim: int, out: np.ndarray) -> ParamSet:
    return ParamSet(layers=[Layer(np.zeros((out.size, in_dim)), out.astype(np.float64))])


class TestInfoNce:
    """Tests for the InfoNCE objective and MI estimate."""

    def test_uniform_scores(self) -> None:
        """Test that equal scores with B = 4 give log(1/4)."""
        assert infonce_objective(np.ones((4, 4))) == pytest.approx(-1.3863, abs=1e-4)
        assert infonce_mi_estimate(np.ones((4, 4))) == pytest.approx(0.0, abs=1e-12)

    def test_two_by_two(self) -> None:
        """Test B = 2 identity scores against direct arithmetic."""
        assert infonce_objective(np.eye(2)) == pytest.approx(-0.3133, abs=1e-4)

    def test_diagonal_saturation(self) -> None:
        """Test that a dominant diagonal approaches 0 and log B."""
        s = 50.0 * np.eye(4)
        assert -1e-12 < infonce_objective(s) <= 0.0
        assert infonce_mi_estimate(s) == pytest.approx(np.log(4), abs=1e-12)

    def test_mi_estimate_bounded_by_log_b(self, rng: np.random.Generator) -> None:
        """Test the log B upper bound on random score matrices."""
        for _ in range(50):
            s = rng.normal(scale=10.0, size=(8, 8))
            assert infonce_mi_estimate(s) <= np.log(8) + 1e-12

    def test_large_scores_stable(self) -> None:
        """Test max-subtraction on huge scores."""
        assert np.isfinite(infonce_objective(1e4 * np.eye(3) + 1e5))

    def test_softmax_shift_invariant(self, rng: np.random.Generator) -> None:
        """Test that adding a per-row constant leaves row softmax unchanged."""
        s = rng.normal(size=(5, 5))
        shifted = s + rng.normal(size=(5, 1)) * 100
        np.testing.assert_allclose(row_softmax(s), row_softmax(shifted), atol=1e-12)

    def test_mask_drops_columns(self) -> None:
        """Test that masked-out negatives leave the softmax."""
        negatives = np.array([[False, False], [False, False]])
        assert infonce_objective(np.eye(2), negatives) == pytest.approx(0.0)

    def test_gradient(self, rng: np.random.Generator) -> None:
        """Test d/dS against central differences."""
        s = rng.normal(size=(4, 4))
        mask = rng.random((4, 4)) > 0.3
        _, g = infonce_grad(s, mask)
        eps = 1e-6
        num = np.zeros_like(s)
        for idx in np.ndindex(*s.shape):
            d = np.zeros_like(s)
            d[idx] = eps
            num[idx] = (infonce_objective(s + d, mask) - infonce_objective(s - d, mask)) / (2 * eps)
        np.testing.assert_allclose(g, num, atol=1e-8)

    @pytest.mark.parametrize("shape", [(3, 4), (1, 1)])
    def test_bad_shapes(self, shape: tuple[int, int]) -> None:
        """Test that non-square or B < 2 matrices are rejected."""
        with pytest.raises(InputError):
            infonce_objective(np.zeros(shape))


class TestBinaryNce:
    """Tests for the BinaryNCE objective."""

    def test_all_zero(self) -> None:
        """Test that sigma(0) = 1/2 gives 2 log(1/2)."""
        assert binary_nce_objective(np.zeros((4, 4))) == pytest.approx(-1.3863, abs=1e-4)

    def test_two_by_two(self) -> None:
        """Test B = 2 against direct arithmetic."""
        s = np.array([[2.0, -2.0], [-2.0, 2.0]])
        assert binary_nce_objective(s) == pytest.approx(-0.2539, abs=1e-4)

    def test_saturation(self) -> None:
        """Test that separated scores approach 0 from below."""
        s = 40.0 * (2 * np.eye(3) - 1)
        assert -1e-12 < binary_nce_objective(s) <= 0.0

    def test_gradient(self, rng: np.random.Generator) -> None:
        """Test d/dS against central differences."""
        s = rng.normal(size=(4, 4))
        _, g = binary_nce_grad(s)
        eps = 1e-6
        for idx in [(0, 0), (1, 2), (3, 1)]:
            d = np.zeros_like(s)
            d[idx] = eps
            num = (binary_nce_objective(s + d) - binary_nce_objective(s - d)) / (2 * eps)
            assert g[idx] == pytest.approx(num, abs=1e-8)


class TestClub:
    """Tests for the CLUB estimate."""

    def test_all_equal(self) -> None:
        """Test that constant scores give 0."""
        assert club_estimate(np.full((3, 3), 2.5)) == pytest.approx(0.0)

    def test_arithmetic(self) -> None:
        """Test diagonal mean 2 and off-diagonal mean 0.5."""
        s = np.full((3, 3), 0.5)
        np.fill_diagonal(s, 2.0)
        assert club_estimate(s) == pytest.approx(1.5)

    def test_masked_off_diagonal(self) -> None:
        """Test that only allowed off-diagonal pairs are averaged."""
        s = np.array([[1.0, 5.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]])
        mask = np.ones((3, 3), dtype=bool)
        mask[0, 1] = False
        assert club_estimate(s, mask) == pytest.approx(1.0)
        _, g = club_grad(s, mask)
        assert g[0, 1] == 0.0


class TestScoreMatrices:
    """Tests for the bilinear critics."""

    def test_unit_embeddings(self) -> None:
        """Test that identical unit embeddings give an all-ones S_v."""
        e1 = np.array([1.0, 0.0, 0.0])
        enc = EncoderSet(_constant_net(4, e1), _constant_net(2, e1), _constant_net(4, np.zeros(3)))
        inputs = CriticInputs(np.ones((3, 4)), np.ones((3, 2)), np.ones((3, 4)))
        scores = score_matrices(enc, inputs)
        np.testing.assert_array_equal(scores.s_v, np.ones((3, 3)))
        np.testing.assert_array_equal(scores.s_full, scores.s_v)

    def test_matches_pairwise(self, rng: np.random.Generator) -> None:
        """Test against per-pair dot products."""
        enc = init_encoders(3, 2, 4, (8,), rng)
        inputs = _random_inputs(rng, b=3)
        scores = score_matrices(enc, inputs)
        assert inputs.pairs is not None
        for i in range(3):
            u = mlp_forward(enc.psi, inputs.anchors[i])
            for j in range(3):
                v = mlp_forward(enc.phi, inputs.visited[j])
                w = mlp_forward(enc.phi_hat, inputs.pairs[j])
                assert scores.s_v[i, j] == pytest.approx(float(u @ v), abs=1e-12)
                assert scores.s_full[i, j] == pytest.approx(float(u @ v + u @ w), abs=1e-12)

    def test_no_pairs_no_boost(self, rng: np.random.Generator) -> None:
        """Test that S_full is absent without augmented states."""
        enc = init_encoders(3, 2, 4, (8,), rng)
        inputs = _random_inputs(rng)
        scores = score_matrices(enc, CriticInputs(inputs.anchors, inputs.visited))
        assert not scores.has_boost
        with pytest.raises(InputError):
            _ = scores.s_full

    def test_encoder_dims_must_agree(self, rng: np.random.Generator) -> None:
        """Test that mismatched output dims are rejected."""
        a = init_encoders(3, 2, 4, (8,), rng)
        b = init_encoders(3, 2, 5, (8,), rng)
        with pytest.raises(ConfigError):
            EncoderSet(a.psi, b.phi, a.phi_hat)


class TestObjectives:
    """Tests for I_BO, I_SaFE and the CRL losses."""

    def test_bo_zero_boost(self, rng: np.random.Generator) -> None:
        """Test that a zero boost reduces I_BO to InfoNCE(S_v)."""
        s = rng.normal(size=(4, 4))
        assert bo_estimate(CriticScores(s, np.zeros((4, 4)))) == pytest.approx(infonce_objective(s))

    def test_bo_uniform(self) -> None:
        """Test uniform S_full with B = 4."""
        assert bo_estimate(CriticScores(np.zeros((4, 4)), np.ones((4, 4)))) == pytest.approx(-1.3863, abs=1e-4)

    def test_bo_equals_full_infonce(self, rng: np.random.Generator) -> None:
        """Test the algebraic identity with the base not detached."""
        scores = CriticScores(rng.normal(size=(6, 6)), rng.normal(size=(6, 6)))
        assert bo_estimate(scores) == pytest.approx(infonce_objective(scores.s_full), abs=1e-12)

    def test_safe_uniform(self) -> None:
        """Test the prose convention on uniform scores: L = 2.7726."""
        scores = CriticScores(np.zeros((4, 4)), np.zeros((4, 4)))
        assert safe_loss(scores, SafeConvention.PROSE, 1.0) == pytest.approx(2.7726, abs=1e-4)

    def test_safe_degenerate_is_twice_cpc(self, rng: np.random.Generator) -> None:
        """Test that a zero boost and lambda = 0 give -2 InfoNCE(S_v)."""
        s = rng.normal(size=(5, 5))
        scores = CriticScores(s, np.zeros((5, 5)))
        assert safe_loss(scores, "prose", 0.0) == pytest.approx(-2.0 * infonce_objective(s))

    def test_safe_literal_differs(self, rng: np.random.Generator) -> None:
        """Test that the literal convention flips the InfoNCE(S_v) and CLUB signs."""
        scores = CriticScores(rng.normal(size=(4, 4)), rng.normal(size=(4, 4)))
        bo = bo_estimate(scores)
        nce = infonce_objective(scores.s_v)
        club = club_estimate(scores.s_full)
        assert safe_loss(scores, "literal", 0.5) == pytest.approx(-(bo - nce + 0.5 * club))

    def test_safe_unknown_convention(self) -> None:
        """Test that an unknown convention is a configuration error."""
        with pytest.raises(ConfigError):
            safe_loss(CriticScores(np.zeros((2, 2)), np.zeros((2, 2))), "reversed")

    def test_crl_values(self) -> None:
        """Test cpc on uniform scores and nce on zero scores."""
        assert crl_loss(CriticScores(np.ones((4, 4))), "cpc") == pytest.approx(1.3863, abs=1e-4)
        assert crl_loss(CriticScores(np.zeros((4, 4))), "nce") == pytest.approx(1.3863, abs=1e-4)

    def test_only_augment_zero_boost_equals_cpc(self, rng: np.random.Generator) -> None:
        """Test only_augment with a zero boost against cpc."""
        s = rng.normal(size=(4, 4))
        scores = CriticScores(s, np.zeros((4, 4)))
        assert crl_loss(scores, "only_augment") == pytest.approx(crl_loss(scores, "cpc"))

    def test_only_augment_needs_boost(self) -> None:
        """Test that only_augment without S_full is an input error."""
        with pytest.raises(InputError):
            crl_loss(CriticScores(np.zeros((3, 3))), "only_augment")


class TestCriticLossGradients:
    """Finite-difference checks of every critic loss graph."""

    @pytest.mark.parametrize(
        "objective",
        [
            CriticObjective(Method.CRL_CPC),
            CriticObjective(Method.CRL_NCE),
            CriticObjective(Method.ONLY_AUGMENT),
            CriticObjective(Method.VISA, SafeConvention.PROSE, 1.0),
            CriticObjective(Method.VISA, SafeConvention.LITERAL, 1.0),
            CriticObjective(Method.VISA, SafeConvention.PROSE, 0.3),
        ],
        ids=["cpc", "nce", "only_augment", "safe_prose", "safe_literal", "safe_lambda"],
    )
    def test_matches_finite_differences(self, objective: CriticObjective) -> None:
        """Test max relative error < 1e-4 over 20 random small batches."""
        for seed in range(20):
            rng = np.random.default_rng(seed)
            enc = _tanh_encoders(rng)
            inputs = _random_inputs(rng)
            mask = rng.random((5, 5)) > 0.2
            loss = CriticLoss(CriticInputs(inputs.anchors, inputs.visited, inputs.pairs, mask), objective)
            assert finite_diff_check(loss, enc.as_list()) < 1e-4

    def test_club_graph(self, rng: np.random.Generator) -> None:
        """Test the CLUB score gradient pulled through the encoders."""

        class ClubLoss:
            def __init__(self, inputs: CriticInputs) -> None:
                self.inputs = inputs

            def value(self, params: list[ParamSet]) -> float:
                return club_estimate(score_matrices(EncoderSet.from_list(params), self.inputs).s_full)

            def value_and_grad(self, params: list[ParamSet]) -> tuple[float, list[ParamSet]]:
                assert self.inputs.pairs is not None
                u, cu = mlp_forward_cached(params[0], self.inputs.anchors)
                v, cv = mlp_forward_cached(params[1], self.inputs.visited)
                w, cw = mlp_forward_cached(params[2], self.inputs.pairs)
                value, g = club_grad(u @ (v + w).T)
                gu, _ = mlp_backward(params[0], cu, g @ (v + w))
                gv, _ = mlp_backward(params[1], cv, g.T @ u)
                gw, _ = mlp_backward(params[2], cw, g.T @ u)
                return value, [gu, gv, gw]

        enc = _tanh_encoders(rng)
        assert finite_diff_check(ClubLoss(_random_inputs(rng)), enc.as_list()) < 1e-4

    def test_crl_leaves_phi_hat_untouched(self, rng: np.random.Generator) -> None:
        """Test that non-augmented objectives give phi_hat a zero gradient."""
        enc = _tanh_encoders(rng)
        loss = CriticLoss(_random_inputs(rng), CriticObjective(Method.CRL_CPC))
        _, grads = loss.value_and_grad(enc.as_list())
        assert np.all(grads[2].flatten() == 0.0)

    def test_visa_needs_pairs(self, rng: np.random.Generator) -> None:
        """Test that visa without augmented inputs is a configuration error."""
        inputs = _random_inputs(rng)
        with pytest.raises(ConfigError):
            CriticLoss(CriticInputs(inputs.anchors, inputs.visited), CriticObjective(Method.VISA))

    def test_degenerate_visa_gradient_direction_matches_cpc(self, rng: np.random.Generator) -> None:
        """Test cosine > 0.999 between visa (zero boost, lambda 0) and cpc encoder gradients."""
        enc = _tanh_encoders(rng).with_zero_boost()
        inputs = _random_inputs(rng, b=8)
        _, g_visa = CriticLoss(inputs, CriticObjective(Method.VISA, lambda_club=0.0)).value_and_grad(enc.as_list())
        _, g_cpc = CriticLoss(inputs, CriticObjective(Method.CRL_CPC)).value_and_grad(enc.as_list())
        for i in (0, 1):
            a, b = g_visa[i].flatten(), g_cpc[i].flatten()
            cosine = float(a @ b / (np.linalg.norm(a) * np.linalg.norm(b)))
            assert cosine > 0.999
            np.testing.assert_allclose(a, 2.0 * b, atol=1e-12)

    def test_detach_base_keeps_value(self, rng: np.random.Generator) -> None:
        """Test that detaching the base changes gradients but not the loss value."""
        enc = _tanh_encoders(rng)
        inputs = _random_inputs(rng)
        plain = CriticLoss(inputs, CriticObjective(Method.VISA))
        detached = CriticLoss(inputs, CriticObjective(Method.VISA, detach_base=True))
        v1, g1 = plain.value_and_grad(enc.as_list())
        v2, g2 = detached.value_and_grad(enc.as_list())
        assert v1 == pytest.approx(v2)
        assert not np.allclose(g1[1].flatten(), g2[1].flatten())

    def test_detached_bo_grad_stages_base_and_boost(self, rng: np.random.Generator) -> None:
        """Test that the base follows InfoNCE(S_v) and the boost follows InfoNCE(S_v + boost)."""
        scores = CriticScores(rng.normal(size=(6, 6)), rng.normal(size=(6, 6)))
        staged = bo_grad(scores, detach_base=True)
        _, g_base = infonce_grad(scores.s_v)
        _, g_full = infonce_grad(scores.s_full)
        assert staged.value == pytest.approx(bo_estimate(scores))
        np.testing.assert_allclose(staged.d_s_v, g_base)
        np.testing.assert_allclose(staged.d_boost, g_full)


class TestQValue:
    """Tests for q_value and the critic occupancy."""

    def test_orthogonal_embeddings(self) -> None:
        """Test that orthogonal psi and phi give 0."""
        enc = EncoderSet(
            _constant_net(3, np.array([1.0, 0.0])),
            _constant_net(2, np.array([0.0, 1.0])),
            _constant_net(4, np.zeros(2)),
        )
        assert q_value(enc, np.zeros(2), np.zeros(1), np.zeros(2)) == 0.0

    def test_identical_unit_embeddings(self) -> None:
        """Test that identical unit embeddings give 1."""
        e = np.array([0.6, 0.8])
        enc = EncoderSet(_constant_net(3, e), _constant_net(2, e), _constant_net(4, np.zeros(2)))
        assert q_value(enc, np.zeros(2), np.zeros(1), np.zeros(2)) == pytest.approx(1.0)

    def test_batched(self, rng: np.random.Generator) -> None:
        """Test that batched inputs give one value per row."""
        enc = init_encoders(2, 1, 4, (8,), rng)
        q = q_value(enc, rng.normal(size=(5, 2)), rng.normal(size=(5, 1)), rng.normal(size=(5, 2)))
        assert isinstance(q, np.ndarray) and q.shape == (5,)

    def test_occupancy_rows_are_distributions(self, rng: np.random.Generator) -> None:
        """Test that the critic occupancy rows sum to 1 and respect the marginal."""
        enc = init_encoders(2, 1, 4, (8,), rng)
        anchors = rng.normal(size=(3, 3))
        goals = rng.normal(size=(6, 2))
        occ = critic_occupancy(enc, anchors, goals)
        np.testing.assert_allclose(occ.sum(axis=1), 1.0)
        marginal = np.array([0.5, 0.1, 0.1, 0.1, 0.1, 0.1])
        reweighted = critic_occupancy(enc, anchors, goals, np.log(marginal))
        ratio = reweighted / occ
        assert np.all(ratio[:, 0] > ratio[:, 1])
