"""Complexity classification: archetypes, fallback rules, enum safety."""

import pytest
from hypothesis import given
from hypothesis import strategies as st

from sumoflow.errors import EmptyQueryError
from sumoflow.planner.complexity import LEVELS, classify_complexity, rule_classify

GANGNAM = "Run a traffic simulation around Gangnam Station in Seoul within a 2 km radius."
TEHERAN = (
    "One or two lanes on Teheran-ro will be closed for construction. "
    "How will this affect congestion?"
)
MSG = (
    "After an event at Madison Square Garden, spectator traffic spreads toward "
    "bridges and tunnels in all directions. I'd like to find where congestion "
    "builds up and how to clear it faster."
)


class TestArchetypes:
    def test_simple_run_request(self):
        assert rule_classify(GANGNAM).level == "simple"

    def test_lane_closure_effect_question_is_complex(self):
        assert rule_classify(TEHERAN).level == "complex"

    def test_open_ended_mitigation_is_agentic(self):
        assert rule_classify(MSG).level == "agentic"

    def test_compare_phrasing_is_complex(self):
        assert rule_classify("Compare green wave against fixed timing.").level == "complex"

    def test_bare_generate_is_simple(self):
        assert rule_classify("Generate a network for downtown.").level == "simple"


class TestLlmValidation:
    def test_valid_llm_answer_wins(self):
        result = classify_complexity(GANGNAM, {"level": "agentic", "rationale": "model says so"})
        assert result.level == "agentic"

    def test_invalid_enum_falls_back(self):
        result = classify_complexity(GANGNAM, {"level": "SUPER-COMPLEX"})
        assert result.level == "simple"

    def test_missing_suggestion_falls_back(self):
        assert classify_complexity(TEHERAN, None).level == "complex"

    def test_empty_query_rejected(self):
        with pytest.raises(EmptyQueryError):
            classify_complexity("   ", None)

    @given(
        garbage=st.one_of(
            st.none(),
            st.dictionaries(st.text(max_size=8), st.text(max_size=12), max_size=3),
            st.builds(dict, level=st.text(max_size=20)),
            st.builds(dict, level=st.integers()),
        )
    )
    def test_enum_safety_under_arbitrary_llm_output(self, garbage):
        result = classify_complexity("run a simulation", garbage)
        assert result.level in LEVELS
