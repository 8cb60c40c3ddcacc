"""Languages and the countability classification of subshifts."""

import numpy as np
import pytest

from dynlab.symbolic import (
    SubshiftError, ClassificationRefused, ClassificationResult, Subshift,
    full_shift, sft, substitution, sturmian, explicit, eventually_periodic,
    morse_generator, morse_substitution, subshift_from_document, language,
    complexity_profile, expansivity_constant, classify_countability,
    recurrent_periodicity_check, subshift_cloud, orbit_closure_cloud,
    sturmian_code, sturmian_two_arrows, continued_fraction, convergents,
    cf_value, follower_graph)


GOLDEN_MEAN = sft(['11'], name='golden-mean')
TWO_CYCLE = sft(['00', '11'])


class TestLanguage(object):

    def test_golden_mean_complexity(self):
        assert complexity_profile(GOLDEN_MEAN, 5) == [2, 3, 5, 8, 13]

    def test_sft_words_longer_than_the_order(self):
        assert language(GOLDEN_MEAN, 3) == \
            {'000', '001', '010', '100', '101'}

    def test_full_shift(self):
        assert language(full_shift('012'), 2) == \
            {a + b for a in '012' for b in '012'}

    def test_short_words_of_an_sft(self):
        assert language(sft(['000', '111']), 1) == {'0', '1'}

    def test_dead_ends_are_dropped(self):
        # '1' can never be followed, so only 0^Z survives.
        sub = sft(['10', '11'])
        assert follower_graph(sub).vertices == ['0']
        assert language(sub, 3) == {'000'}

    def test_sturmian_complexity(self):
        assert complexity_profile(sturmian(cf=[1]), 8) == list(range(2, 10))

    def test_morse(self):
        sub = morse_generator()
        assert sub.word(0, 15) == '0110100110010110'
        assert sub.word(-1, 0) == '00'
        assert sub.word(-4, -1) == '0110'[::-1]

    def test_undeclared_behaviour_is_refused(self):
        sub = explicit(lambda n: np.zeros(len(n), np.int64))
        with pytest.raises(SubshiftError):
            language(sub, 3)

    def test_word_length(self):
        with pytest.raises(SubshiftError):
            language(GOLDEN_MEAN, 0)


class TestSubshiftDescriptions(object):

    def test_forbidden_words_over_the_alphabet(self):
        with pytest.raises(SubshiftError):
            sft(['12'])

    def test_rules_cover_the_alphabet(self):
        with pytest.raises(SubshiftError):
            substitution({'0': '01'})

    def test_rational_sturmian(self):
        with pytest.raises(SubshiftError):
            sturmian(0.5)

    def test_explicit_needs_a_generator(self):
        with pytest.raises(SubshiftError):
            Subshift('explicit')

    def test_eventually_periodic_needs_tails(self):
        with pytest.raises(SubshiftError):
            eventually_periodic('', '1', '0')

    def test_document(self):
        sub = subshift_from_document({'kind': 'sft', 'forbidden': ['11']})
        assert sub.forbidden == ('11',)
        assert subshift_from_document({'kind': 'morse'}).label == 'morse'
        with pytest.raises(SubshiftError):
            subshift_from_document({'kind': 'explicit', 'center': '1'})
        with pytest.raises(SubshiftError):
            subshift_from_document({'kind': 'sofic'})


class TestClassification(object):

    def test_full_shift(self):
        result = classify_countability(full_shift())
        assert result.countability == 'Uncountable'
        assert result.rn_verdict == 'not-RN'
        assert classify_countability(full_shift('0')).rn_verdict == 'RN'

    def test_two_cycles_share_a_vertex(self):
        result = classify_countability(GOLDEN_MEAN)
        assert result.countability == 'Uncountable'
        assert result.witness['vertex'] == '0'

    def test_single_cycle(self):
        result = classify_countability(TWO_CYCLE)
        assert result.countability == 'Countable'
        assert result.evidence['cycle_structure'] == [2]

    def test_cycles_joined_by_a_path(self):
        # 0^Z, 1^Z and the points 0..01..1: countable.
        result = classify_countability(sft(['10']))
        assert result.countability == 'Countable'

    def test_sturmian(self):
        result = classify_countability(sturmian(cf=[2]))
        assert result.rn_verdict == 'not-RN'

    def test_morse_substitution(self):
        result = classify_countability(morse_substitution())
        assert result.countability == 'Uncountable'
        assert result.evidence['primitive']

    def test_periodic_substitution(self):
        result = classify_countability(substitution({'0': '01',
                                                     '1': '01'}))
        assert result.countability == 'Countable'

    def test_non_primitive_substitution(self):
        result = classify_countability(substitution({'0': '0',
                                                     '1': '01'}))
        assert result.countability == 'Unknown'
        assert result.rn_verdict == 'Unknown'

    def test_eventually_periodic(self):
        result = classify_countability(eventually_periodic('0', '1', '0'))
        assert result.countability == 'Countable'

    def test_morse_generator(self):
        result = classify_countability(morse_generator(), 64)
        assert result.countability == 'Uncountable'
        assert result.evidence['rule'] == 'recurrent aperiodic point'

    def test_depth_must_be_positive(self):
        with pytest.raises(SubshiftError):
            classify_countability(GOLDEN_MEAN, 0)


class TestRecurrentPoints(object):

    def test_rn_subshift(self):
        cloud = subshift_cloud(TWO_CYCLE, 17)
        assert len(cloud) == 2
        result = recurrent_periodicity_check(TWO_CYCLE, cloud.points)
        assert result
        assert result.detail['periods'] == {2: 2}

    def test_orbit_closure_of_an_explicit_point(self):
        sub = eventually_periodic('0', '1', '0')
        cloud = orbit_closure_cloud(sub, 8)
        assert recurrent_periodicity_check(sub, cloud.points)

    def test_refused_for_non_rn(self):
        with pytest.raises(ClassificationRefused):
            recurrent_periodicity_check(GOLDEN_MEAN,
                                        subshift_cloud(GOLDEN_MEAN, 5).points)

    def test_overlap_free_recurrent_window_is_flagged(self):
        # The Morse centre word of radius 8 returns 24 steps later, which
        # is longer than the word itself, so it is recurrent without a
        # period. Forcing a countable verdict must expose that.
        sub = morse_generator()
        window = sub.sequence(np.arange(-32, 33))
        result = recurrent_periodicity_check(
            sub, window, classification=ClassificationResult('Countable'))
        assert not result
        assert result.detail['recurrent'] == 1
        assert result.detail['violations'] == [0]
        assert result.detail['contradiction']

    def test_eventually_periodic_windows_are_not_flagged(self):
        sub = eventually_periodic('01', '11', '0')
        result = recurrent_periodicity_check(
            sub, orbit_closure_cloud(sub, 12).points)
        assert result
        assert set(result.detail['periods']) <= {1, 2}


def test_expansivity_constant():
    assert expansivity_constant(GOLDEN_MEAN) == 0.5
    assert expansivity_constant(full_shift('0')) is None


class TestContinuedFractions(object):

    def test_golden(self):
        alpha = cf_value([1])
        assert alpha == pytest.approx((np.sqrt(5) - 1) / 2)
        quotients = continued_fraction(alpha, 8)
        assert quotients == [0, 1, 1, 1, 1, 1, 1, 1]
        assert [c.denominator for c in convergents(quotients)] == \
            [1, 1, 2, 3, 5, 8, 13, 21]

    def test_positive_period(self):
        with pytest.raises(SubshiftError):
            cf_value([0])


class TestTwoArrows(object):

    def test_pair_differs_at_the_orbit_hits(self):
        model = sturmian_two_arrows(cf=[1], depth=4)
        plus, minus = model.pair(0)
        assert np.flatnonzero(plus != minus).tolist() == [4, 5]
        assert plus[4] == 1 and minus[5] == 1

    def test_generic_point_has_one_coding(self):
        alpha = cf_value([1])
        positions = np.arange(-6, 7)
        assert np.array_equal(sturmian_code(alpha, 0.3, positions, '+'),
                              sturmian_code(alpha, 0.3, positions, '-'))

    def test_factor(self):
        model = sturmian_two_arrows(cf=[1], depth=4)
        window = model.point(0, 0.3)
        lo, hi = model.factor(window)
        beta = 0.3
        assert lo <= beta < hi or (hi < lo and (beta >= lo or beta < hi))

    def test_side(self):
        with pytest.raises(SubshiftError):
            sturmian_code(0.3, 0.1, [0], side='0')
