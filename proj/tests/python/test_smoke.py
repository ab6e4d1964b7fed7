import copy

import pytest

import awareauto

AC_RULE = {
    "operation": "create", "name": "cool down", "feasible": True, "errors": [],
    "ta_pairs": [{
        "triggers": [{"target": "VoiceAssistant", "interface": "ruleName", "condition": "cool down",
                      "mode": "event", "delay_s": 0}],
        "actions": [{"target": "air conditioner", "interface": "switch", "parameter": "on"},
                    {"target": "timer", "interface": "wait", "parameter": "10mins"},
                    {"target": "air conditioner", "interface": "switch", "parameter": "off"}],
    }],
}


def test_format_rate_reference_rows():
    assert awareauto.format_rate(188, 205) == "91.7"
    assert awareauto.format_rate(45, 50) == "90.0"
    assert awareauto.format_rate(6, 10) == "60.0"
    assert awareauto.format_rate(198, 205, 2) == "96.59"


def test_normalize_sofa_sentence():
    text = awareauto.describe({"posture_activity": "sits", "position": "sofa", "gesture": "points",
                                "gesture_target": "ceiling light", "speech": "Turn on this light when I sit here."})
    assert text == ('The user sits on the sofa, points towards ceiling light, and says, '
                    '"Turn on this light when I sit here."')


def test_normalize_prepends_context():
    text = awareauto.normalize({"speech": "Hi."}, {"time": "19:30", "weekday": "Friday",
                                                   "temperature": 26.5, "humidity": 40, "device_states": {}})
    assert text == 'Context: time=19:30 Friday, temperature=26.5C, humidity=40%.\nThe user says, "Hi."'


def test_tuple_display_roundtrip():
    for s in ("TV-switch-on-event", "ActivitySensor-isThereUserActivity-false-state(10mins)"):
        assert awareauto.roundtrip_trigger(s) == s
    assert awareauto.roundtrip_action("timer-wait-10mins") == "timer-wait-10mins"


def test_rule_text_parse_error_raises():
    with pytest.raises(awareauto.ParseError):
        awareauto.reformat_rule_text("OPERATION: MAKE\n")


def test_validate_catches_user_enter():
    rule = copy.deepcopy(AC_RULE)
    rule["ta_pairs"][0]["triggers"] = [{"target": "environment sensor", "interface": "UserEnter",
                                        "condition": "bedroom", "mode": "event", "delay_s": 0}]
    out = awareauto.validate(rule)
    assert out["feasible"] is False
    assert [e["code"] for e in out["errors"]] == ["UNKNOWN_INTERFACE"]
    assert awareauto.validate(AC_RULE)["feasible"] is True


def test_simulate_ac_timer():
    events = [{"at": 0, "target": "VoiceAssistant", "interface": "ruleName", "value": "cool down"}]
    trace = awareauto.simulate(AC_RULE, events, until=3600)
    assert [(e["at"], e["parameter"]) for e in trace] == [(0, "on"), (600, "off")]


def test_simulate_rejects_infeasible():
    rule = copy.deepcopy(AC_RULE)
    rule["ta_pairs"][0]["actions"][0]["parameter"] = "purple"
    with pytest.raises(awareauto.DeploymentError):
        awareauto.simulate(rule, [])


def test_scripted_eval_is_perfect():
    report = awareauto.evaluate()
    assert report["cases"] >= 27
    assert all(v == "100.0" for v in report["overall"]["rates"].values())
