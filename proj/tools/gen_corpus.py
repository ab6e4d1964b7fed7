#!/usr/bin/env python3
"""Writes the bundled catalog, evaluation corpus and scripted model responses.

    python3 tools/gen_corpus.py            # writes into data/
    build/seed_fixtures                    # turns responses into fixtures

The responses file holds what a model answered for each case (reasoning
attempts, then grounding attempts). seed_fixtures replays them through the
real pipeline so the fixture keys match the prompts exactly.
"""

import json
import re
from pathlib import Path

ROOT = Path(__file__).resolve().parent.parent
DATA = ROOT / "data"

# ---------------------------------------------------------------------------
# Catalog
# ---------------------------------------------------------------------------

ON_OFF = {"type": "enum", "values": ["on", "off"]}
BOOL = {"type": "enum", "values": ["true", "false"]}
TEXT = {"type": "text"}


def rng(lo, hi):
    return {"type": "range", "min": lo, "max": hi}


def enum(*values):
    return {"type": "enum", "values": list(values)}


def query(name, returns, desc):
    return {"name": name, "kind": "query", "params": [], "returns": returns, "description": desc}


def operation(name, param, domain, desc):
    return {"name": name, "kind": "operation", "params": [{"name": param, "domain": domain}],
            "returns": None, "description": desc}


def settable(name, domain, what, param="value"):
    """A readable and writable property: query and operation share the name."""
    return [query(name, domain, f"current {what}"), operation(name, param, domain, f"set the {what}")]


def device(target, room, position, *groups):
    interfaces = []
    for g in groups:
        interfaces.extend(g if isinstance(g, list) else [g])
    return {"target": target, "room": room, "position": position, "interfaces": interfaces}


LOCATIONS = enum("sofa", "bed", "desk", "kitchen", "door", "none")

CATALOG = {
    "rooms": ["living room", "bedroom", "kitchen"],
    "devices": [
        device("TV", "living room", "in front of the sofa",
               settable("switch", ON_OFF, "power state", "state"),
               settable("channel", rng(1, 999), "channel", "number"),
               settable("volume", rng(0, 100), "volume", "level")),
        device("ceiling light", "living room", "ceiling of the living room",
               settable("switch", ON_OFF, "power state", "state"),
               settable("brightness", rng(0, 100), "brightness in percent", "level"),
               settable("color", enum("warm", "cool", "neutral"), "color temperature", "color")),
        device("sofa light", "living room", "floor lamp next to the sofa",
               settable("switch", ON_OFF, "power state", "state"),
               settable("brightness", rng(0, 100), "brightness in percent", "level")),
        device("bedroom light", "bedroom", "ceiling above the bed",
               settable("switch", ON_OFF, "power state", "state"),
               settable("brightness", rng(0, 100), "brightness in percent", "level"),
               settable("color", enum("warm", "cool", "neutral"), "color temperature", "color")),
        device("air conditioner", "living room", "living room wall",
               settable("switch", ON_OFF, "power state", "state"),
               settable("temperature", rng(16, 30), "target temperature in degrees C", "degrees"),
               settable("mode", enum("cool", "heat", "fan", "dry"), "operating mode", "mode")),
        device("curtains", "living room", "living room window",
               settable("state", enum("open", "closed"), "curtain position", "position")),
        device("bedroom curtains", "bedroom", "bedroom window",
               settable("state", enum("open", "closed"), "curtain position", "position")),
        device("window", "living room", "living room wall",
               settable("state", enum("open", "closed"), "window position", "position")),
        device("cleaning robot", "living room", "charging dock by the door",
               settable("cleaning", ON_OFF, "cleaning state", "state")),
        device("speaker", "living room", "shelf next to the TV",
               settable("switch", ON_OFF, "power state", "state"),
               settable("play", TEXT, "content being played", "content"),
               settable("volume", rng(0, 100), "volume", "level")),
        device("humidifier", "bedroom", "bedside",
               settable("switch", ON_OFF, "power state", "state"),
               settable("level", rng(1, 3), "mist level", "level")),
        device("kettle", "kitchen", "kitchen counter",
               settable("switch", ON_OFF, "heating state", "state")),
        device("ActivitySensor", "living room", "ceiling of the living room",
               query("isThereUserActivity", BOOL, "whether anyone is active in the home"),
               query("userPosture", enum("standing", "sitting", "lying"), "the user's posture"),
               query("userLocation", LOCATIONS, "where the user is"),
               query("userActivity", enum("watching TV", "reading", "sleeping", "cooking", "eating", "working", "none"),
                     "what the user is doing")),
        device("environment sensor", "living room", "living room wall",
               query("temperature", rng(-40, 60), "indoor temperature in degrees C"),
               query("humidity", rng(0, 100), "indoor relative humidity in percent"),
               query("weather", enum("sunny", "cloudy", "raining", "snowing"), "weather outside"),
               query("illuminance", rng(0, 100000), "indoor light level in lux")),
        device("door sensor", "living room", "front door",
               query("door", enum("open", "closed"), "front door state")),
        device("clock", "living room", "virtual",
               query("time", TEXT, "current time as HH:MM"),
               query("hour", rng(0, 23), "current hour"),
               query("weekday", enum("Monday", "Tuesday", "Wednesday", "Thursday", "Friday", "Saturday", "Sunday"),
                     "day of the week"),
               query("isWeekend", BOOL, "whether today is Saturday or Sunday")),
        device("VoiceAssistant", "living room", "shelf next to the TV",
               query("ruleName", TEXT, "name of a rule the user just said"),
               operation("speak", "sentence", TEXT, "say a sentence out loud")),
        device("gesture sensor", "living room", "above the TV",
               query("gesture", enum("snap finger", "wave", "thumbs up", "point"), "gesture the user just made")),
    ],
}

# ---------------------------------------------------------------------------
# Rule helpers
# ---------------------------------------------------------------------------

UNITS = {"s": 1, "min": 60, "mins": 60, "h": 3600}


def duration(text):
    m = re.fullmatch(r"(\d+)(s|mins|min|h)", text)
    if not m:
        raise ValueError(text)
    return int(m.group(1)) * UNITS[m.group(2)]


def trig(display):
    parts = display.split("-")
    mode = parts[-1]
    delay = 0
    m = re.fullmatch(r"state\((.+)\)", mode)
    if m:
        mode, delay = "state", duration(m.group(1))
    return {"target": parts[0], "interface": parts[1], "condition": "-".join(parts[2:-1]),
            "mode": mode, "delay_s": delay}


def act(display):
    parts = display.split("-")
    return {"target": parts[0], "interface": parts[1], "parameter": "-".join(parts[2:])}


def pair(triggers, actions):
    return {"triggers": [trig(t) for t in triggers], "actions": [act(a) for a in actions]}


def name_pair(name, actions):
    return pair([f"VoiceAssistant-ruleName-{name}-event"], actions)


def grounded(pairs, op="create", name=None, feasible=True, errors=None):
    return {"operation": op, "name": name, "feasible": feasible, "ta_pairs": pairs, "errors": errors or []}


def snap(time="19:30", weekday="Wednesday", temperature=24, humidity=45, states=None):
    return {"time": time, "weekday": weekday, "temperature": temperature, "humidity": humidity,
            "device_states": states or {}}


def expr(speech, posture=None, position=None, orientation=None, gesture=None, target=None):
    return {"posture_activity": posture, "position": position, "orientation": orientation,
            "gesture": gesture, "gesture_target": target, "speech": speech}


CASES = []
RESPONSES = {}


def case(cid, complexity, expression, snapshot, gold_nl, gold=None, infeasible=None, base_nl=None,
         reasoning=None, grounding=None):
    c = {"id": cid, "complexity": complexity, "input": {"expression": expression, "snapshot": snapshot},
         "gold_nl": gold_nl.strip() + "\n"}
    if base_nl:
        c["base_nl"] = base_nl.strip() + "\n"
    if gold is not None:
        c["gold_grounded"] = gold
    else:
        c["gold_infeasible_reason"] = infeasible
    CASES.append(c)
    RESPONSES[cid] = {
        "reasoning": reasoning or [gold_nl.strip() + "\n"],
        "grounding": grounding if grounding is not None else ([json.dumps(gold, indent=2)] if gold and gold["ta_pairs"] else []),
    }


def fenced(text, lead="Here is the rule."):
    return f"{lead}\n```\n{text.strip()}\n```\n"


def without_name_pairs(g):
    g = json.loads(json.dumps(g))
    g["ta_pairs"] = [p for p in g["ta_pairs"]
                     if not (len(p["triggers"]) == 1 and p["triggers"][0]["interface"] == "ruleName")]
    return g


# ---------------------------------------------------------------------------
# Multi-parameter
# ---------------------------------------------------------------------------

case("mp-01-door-evening", "multi_parameter",
     expr("When the front door opens after six in the evening, turn on the ceiling light at 80 percent and switch on the TV."),
     snap(time="17:40"),
     """
OPERATION: CREATE
NAME: NONE
TRIGGERS:
  T1 | EVENT | the front door opens
  T2 | STATE | it is 18:00 or later
ACTIONS:
  G1 WHEN T1,T2:
    A1 | turn on the ceiling light
    A2 | set the ceiling light brightness to 80
    A3 | turn on the TV
""",
     grounded([pair(["door sensor-door-open-event", "clock-hour->=18-state"],
                    ["ceiling light-switch-on", "ceiling light-brightness-80", "TV-switch-on"])]))

case("mp-02-hot-humid", "multi_parameter",
     expr("If it's above 28 degrees and the humidity is over 70 percent, run the air conditioner in cooling mode at 24 degrees."),
     snap(temperature=27, humidity=66),
     """
OPERATION: CREATE
NAME: NONE
TRIGGERS:
  T1 | STATE | the indoor temperature is above 28 degrees
  T2 | STATE | the humidity is above 70 percent
ACTIONS:
  G1 WHEN T1,T2:
    A1 | turn on the air conditioner
    A2 | set the air conditioner mode to cool
    A3 | set the air conditioner temperature to 24
""",
     grounded([pair(["environment sensor-temperature->28-state", "environment sensor-humidity->70-state"],
                    ["air conditioner-switch-on", "air conditioner-mode-cool", "air conditioner-temperature-24"])]),
     reasoning=[fenced("""
OPERATION: CREATE
NAME: NONE
TRIGGERS:
  T1 | STATE | the indoor temperature is above 28 degrees
  T2 | STATE | the humidity is above 70 percent
ACTIONS:
  G1 WHEN T1,T2:
    A1 | turn on the air conditioner
    A2 | set the air conditioner mode to cool
    A3 | set the air conditioner temperature to 24
""")])

case("mp-03-wave-tv", "multi_parameter",
     expr("When I wave, turn the TV on, put it on channel 5 and set the volume to 20."),
     snap(),
     """
OPERATION: CREATE
NAME: NONE
TRIGGERS:
  T1 | EVENT | the user waves
ACTIONS:
  G1 WHEN T1:
    A1 | turn on the TV
    A2 | switch the TV to channel 5
    A3 | set the TV volume to 20
""",
     grounded([pair(["gesture sensor-gesture-wave-event"], ["TV-switch-on", "TV-channel-5", "TV-volume-20"])]))

# The model invents an interface for "entering the bedroom".
USER_ENTER = grounded([pair(["environment sensor-UserEnter-bedroom-event"],
                            ["bedroom light-switch-on", "humidifier-switch-on"])])
case("mp-04-enter-bedroom", "multi_parameter",
     expr("Turn on the bedroom light and the humidifier when I enter the bedroom."),
     snap(time="22:10"),
     """
OPERATION: CREATE
NAME: NONE
TRIGGERS:
  T1 | EVENT | the user enters the bedroom
ACTIONS:
  G1 WHEN T1:
    A1 | turn on the bedroom light
    A2 | turn on the humidifier
""",
     infeasible=["UNKNOWN_INTERFACE"],
     grounding=[json.dumps(USER_ENTER, indent=2)])

# ---------------------------------------------------------------------------
# Dynamic parameters
# ---------------------------------------------------------------------------

case("dp-01-light-follows", "dynamic_parameters",
     expr("Turn on the light over my head wherever I go."),
     snap(states={"ActivitySensor": {"userLocation": "sofa"}}),
     """
OPERATION: CREATE
NAME: NONE
TRIGGERS:
  T1 | EVENT | the user moves to another place
ACTIONS:
  G1 WHEN T1:
    A1 | turn on the light nearest to the user
""",
     grounded([pair(["ActivitySensor-userLocation-!=none-event"], ["@nearest(light, user)-switch-on"])]))

case("dp-02-reading-light", "dynamic_parameters",
     expr("When I read, turn on the light next to me.", posture="sits", position="sofa"),
     snap(states={"ActivitySensor": {"userLocation": "sofa"}}),
     """
OPERATION: CREATE
NAME: NONE
TRIGGERS:
  T1 | EVENT | the user starts reading
ACTIONS:
  G1 WHEN T1:
    A1 | turn on the light next to the user
    A2 | set the brightness of the light next to the user to 100
""",
     grounded([pair(["ActivitySensor-userActivity-reading-event"],
                    ["@nearest(light, user)-switch-on", "@nearest(light, user)-brightness-100"])]))

case("dp-03-dim-nearest", "dynamic_parameters",
     expr("In the evening, whenever I sit down, dim the light closest to me to 30 percent."),
     snap(time="18:20"),
     """
OPERATION: CREATE
NAME: NONE
TRIGGERS:
  T1 | EVENT | the user sits down
  T2 | STATE | it is 19:00 or later
ACTIONS:
  G1 WHEN T1,T2:
    A1 | set the brightness of the light closest to the user to 30
""",
     grounded([pair(["ActivitySensor-userPosture-sitting-event", "clock-hour->=19-state"],
                    ["@nearest(light, user)-brightness-30"])]))

# ---------------------------------------------------------------------------
# Multimodal parameters
# ---------------------------------------------------------------------------

case("mm-01-sofa-point", "multimodal_parameters",
     expr("Turn on this light when I sit here.", posture="sits", position="sofa", gesture="points",
          target="ceiling light"),
     snap(),
     """
OPERATION: CREATE
NAME: NONE
TRIGGERS:
  T1 | STATE | the user sits on the sofa
ACTIONS:
  G1 WHEN T1:
    A1 | turn on the ceiling light
""",
     grounded([pair(["ActivitySensor-userPosture-sitting-state", "ActivitySensor-userLocation-sofa-state"],
                    ["ceiling light-switch-on"])]))

case("mm-02-bed-curtains", "multimodal_parameters",
     expr("Close these when I lie here at night.", posture="lies", position="bed", gesture="points",
          target="bedroom curtains"),
     snap(time="21:50"),
     """
OPERATION: CREATE
NAME: NONE
TRIGGERS:
  T1 | STATE | the user lies on the bed
  T2 | STATE | it is 22:00 or later
ACTIONS:
  G1 WHEN T1,T2:
    A1 | close the bedroom curtains
""",
     grounded([pair(["ActivitySensor-userPosture-lying-state", "ActivitySensor-userLocation-bed-state",
                     "clock-hour->=22-state"],
                    ["bedroom curtains-state-closed"])]))

case("mm-03-sofa-leave", "multimodal_parameters",
     expr("Turn this off when I leave.", posture="stands", position="sofa", gesture="points", target="sofa light"),
     snap(states={"sofa light": {"switch": "on"}}),
     """
OPERATION: CREATE
NAME: NONE
TRIGGERS:
  T1 | STATE(2mins) | the user is away from the sofa
ACTIONS:
  G1 WHEN T1:
    A1 | turn off the sofa light
""",
     grounded([pair(["ActivitySensor-userLocation-!=sofa-state(2mins)"], ["sofa light-switch-off"])]))

case("mm-04-snap-tv", "multimodal_parameters",
     expr("Whenever I do this, turn it on.", posture="sits", position="sofa", orientation="faces the TV",
          gesture="snaps fingers", target="TV"),
     snap(),
     """
OPERATION: CREATE
NAME: NONE
TRIGGERS:
  T1 | EVENT | the user snaps fingers
ACTIONS:
  G1 WHEN T1:
    A1 | turn on the TV
""",
     grounded([pair(["gesture sensor-gesture-snap finger-event"], ["TV-switch-on"])]))

# ---------------------------------------------------------------------------
# Fuzzy expression
# ---------------------------------------------------------------------------

case("fz-01-warmer-light", "fuzzy_expression",
     expr("Make the light warmer when I'm watching TV.", posture="sits", position="sofa"),
     snap(states={"ceiling light": {"switch": "on", "color": "cool"}}),
     """
OPERATION: CREATE
NAME: NONE
TRIGGERS:
  T1 | STATE | the user is watching TV
ACTIONS:
  G1 WHEN T1:
    A1 | set the ceiling light color to warm
""",
     grounded([pair(["ActivitySensor-userActivity-watching TV-state"], ["ceiling light-color-warm"])]))

case("fz-02-turn-up-ac", "fuzzy_expression",
     expr("Turn up the air conditioning temperature when it gets cold in here."),
     snap(temperature=20, states={"air conditioner": {"switch": "on", "temperature": "24"}}),
     """
OPERATION: CREATE
NAME: NONE
TRIGGERS:
  T1 | STATE | the indoor temperature is below 18 degrees
ACTIONS:
  G1 WHEN T1:
    A1 | set the air conditioner temperature to 26
""",
     grounded([pair(["environment sensor-temperature-<18-state"], ["air conditioner-temperature-26"])]))

case("fz-03-brighter-dark", "fuzzy_expression",
     expr("When it gets dark, put the sofa lamp on, a bit brighter than usual.", posture="sits", position="sofa"),
     snap(time="17:00"),
     """
OPERATION: CREATE
NAME: NONE
TRIGGERS:
  T1 | STATE | the room is darker than 50 lux
ACTIONS:
  G1 WHEN T1:
    A1 | turn on the sofa light
    A2 | set the sofa light brightness to 70
""",
     grounded([pair(["environment sensor-illuminance-<50-state"],
                    ["sofa light-switch-on", "sofa light-brightness-70"])]))

case("fz-04-delete-movie", "fuzzy_expression",
     expr("Get rid of that movie mode thing I set up."),
     snap(),
     """
OPERATION: DELETE
NAME: movie mode
TRIGGERS:
ACTIONS:
""",
     grounded([], op="delete", name="movie mode"))

# ---------------------------------------------------------------------------
# Redundant expressions
# ---------------------------------------------------------------------------

SLEEP_ACTIONS = ["TV-switch-off", "ceiling light-switch-off", "sofa light-switch-off", "speaker-switch-off",
                 "air conditioner-switch-on"]
SLEEP_STEPS = """
    A1 | turn off the TV
    A2 | turn off the ceiling light
    A3 | turn off the sofa light
    A4 | turn off the speaker
    A5 | turn on the air conditioner
"""

case("rd-01-sleep-mode", "redundant_expressions",
     expr("Set a sleep mode. If I lie on the couch, then all devices are off, and only the air conditioning is on. "
          "Nope, it doesn't need to be triggered by lying."),
     snap(time="23:00"),
     """
OPERATION: CREATE
NAME: sleep mode
TRIGGERS:
ACTIONS:
  G1 WHEN T0:""" + SLEEP_STEPS,
     grounded([name_pair("sleep mode", SLEEP_ACTIONS)], name="sleep mode"))

case("rd-02-kettle-announce", "redundant_expressions",
     expr("Uh, so my friend told me about this, um, when the kettle finishes boiling, you know, just let me know, "
          "the voice assistant is fine, or, well, whatever talks."),
     snap(),
     """
OPERATION: CREATE
NAME: NONE
TRIGGERS:
  T1 | EVENT | the kettle switches off
ACTIONS:
  G1 WHEN T1:
    A1 | say that the water is ready
""",
     grounded([pair(["kettle-switch-off-event"], ["VoiceAssistant-speak-the water is ready"])]))

case("rd-03-news", "redundant_expressions",
     expr("I usually watch the news at seven, which I love, so at 19:00 on weekdays turn on the TV, "
          "I mean channel 13, not the sports one."),
     snap(),
     """
OPERATION: CREATE
NAME: NONE
TRIGGERS:
  T1 | EVENT | it is 19:00
  T2 | STATE | it is a weekday
ACTIONS:
  G1 WHEN T1,T2:
    A1 | turn on the TV
    A2 | switch the TV to channel 13
""",
     grounded([pair(["clock-time-19:00-event", "clock-isWeekend-false-state"], ["TV-switch-on", "TV-channel-13"])]))

SLEEP_BASE = """
OPERATION: CREATE
NAME: sleep mode
TRIGGERS:
  T1 | STATE | the user lies on the sofa
ACTIONS:
  G1 WHEN T1:""" + SLEEP_STEPS

case("rd-04-sleep-correction", "redundant_expressions",
     expr("Nope, it doesn't need to be triggered by lying."),
     snap(time="23:00"),
     """
OPERATION: MODIFY
NAME: sleep mode
TRIGGERS:
ACTIONS:
  G1 WHEN T0:
""",
     grounded([name_pair("sleep mode", SLEEP_ACTIONS)], op="modify", name="sleep mode"),
     base_nl=SLEEP_BASE)

# ---------------------------------------------------------------------------
# Complex branch
# ---------------------------------------------------------------------------

case("cb-01-tv-rain", "complex_branch",
     expr("Turn on the ceiling light when the user is watching TV and switch the light to warm if it is raining outside."),
     snap(),
     """
OPERATION: CREATE
NAME: NONE
TRIGGERS:
  T1 | STATE | the user is watching TV
  T2 | STATE | it is raining outside
ACTIONS:
  G1 WHEN T1:
    A1 | turn on the ceiling light
  G2 WHEN T1,T2:
    A1 | set the ceiling light color to warm
""",
     grounded([pair(["ActivitySensor-userActivity-watching TV-state"], ["ceiling light-switch-on"]),
               pair(["ActivitySensor-userActivity-watching TV-state", "environment sensor-weather-raining-state"],
                    ["ceiling light-color-warm"])]))

case("cb-02-door-dark-rain", "complex_branch",
     expr("When someone opens the front door, turn on the ceiling light if it's dark, and tell me it's raining if it is."),
     snap(),
     """
OPERATION: CREATE
NAME: NONE
TRIGGERS:
  T1 | EVENT | the front door opens
  T2 | STATE | the room is darker than 50 lux
  T3 | STATE | it is raining outside
ACTIONS:
  G1 WHEN T1,T2:
    A1 | turn on the ceiling light
  G2 WHEN T1,T3:
    A1 | say that it is raining outside
""",
     grounded([pair(["door sensor-door-open-event", "environment sensor-illuminance-<50-state"],
                    ["ceiling light-switch-on"]),
               pair(["door sensor-door-open-event", "environment sensor-weather-raining-state"],
                    ["VoiceAssistant-speak-it is raining outside"])]))

case("cb-03-morning", "complex_branch",
     expr("When I get up in the morning open the curtains, and on weekdays switch on the kettle too.",
          posture="lies", position="bed"),
     snap(time="07:00", weekday="Tuesday"),
     """
OPERATION: CREATE
NAME: NONE
TRIGGERS:
  T1 | EVENT | the user stands up
  T2 | STATE | it is before 10:00
  T3 | STATE | it is a weekday
ACTIONS:
  G1 WHEN T1,T2:
    A1 | open the bedroom curtains
  G2 WHEN T1,T2,T3:
    A1 | turn on the kettle
""",
     grounded([pair(["ActivitySensor-userPosture-standing-event", "clock-hour-<10-state"],
                    ["bedroom curtains-state-open"]),
               pair(["ActivitySensor-userPosture-standing-event", "clock-hour-<10-state", "clock-isWeekend-false-state"],
                    ["kettle-switch-on"])]))

case("cb-04-humidity-band", "complex_branch",
     expr("If the humidity drops below 30 percent turn the humidifier on, and turn it off again once it's above 60."),
     snap(humidity=35),
     """
OPERATION: CREATE
NAME: NONE
TRIGGERS:
  T1 | STATE | the humidity is below 30 percent
  T2 | STATE | the humidity is above 60 percent
ACTIONS:
  G1 WHEN T1:
    A1 | turn on the humidifier
  G2 WHEN T2:
    A1 | turn off the humidifier
""",
     grounded([pair(["environment sensor-humidity-<30-state"], ["humidifier-switch-on"]),
               pair(["environment sensor-humidity->60-state"], ["humidifier-switch-off"])]))

# ---------------------------------------------------------------------------
# Time-related trigger
# ---------------------------------------------------------------------------

case("tr-01-left-room", "time_related_trigger",
     expr("Turn off the TV after I've left the living room for 10 minutes."),
     snap(states={"TV": {"switch": "on"}}),
     """
OPERATION: CREATE
NAME: NONE
TRIGGERS:
  T1 | STATE(10mins) | the user has left the living room
ACTIONS:
  G1 WHEN T1:
    A1 | turn off the TV
""",
     grounded([pair(["ActivitySensor-isThereUserActivity-false-state(10mins)"], ["TV-switch-off"])]))

case("tr-02-noon-nap", "time_related_trigger",
     expr("Close the curtains for me when I sleep on the sofa at noon."),
     snap(time="11:30"),
     """
OPERATION: CREATE
NAME: NONE
TRIGGERS:
  T1 | STATE | the user is sleeping on the sofa
  T2 | STATE | it is noon
ACTIONS:
  G1 WHEN T1,T2:
    A1 | close the curtains
""",
     grounded([pair(["ActivitySensor-userActivity-sleeping-state", "ActivitySensor-userLocation-sofa-state",
                     "clock-hour-12-state"],
                    ["curtains-state-closed"])]))

case("tr-03-window-ac", "time_related_trigger",
     expr("If the window has been open for half an hour while the AC is running, switch the AC off."),
     snap(states={"air conditioner": {"switch": "on"}}),
     """
OPERATION: CREATE
NAME: NONE
TRIGGERS:
  T1 | STATE(30mins) | the window is open
  T2 | STATE | the air conditioner is on
ACTIONS:
  G1 WHEN T1,T2:
    A1 | turn off the air conditioner
""",
     grounded([pair(["window-state-open-state(30mins)", "air conditioner-switch-on-state"],
                    ["air conditioner-switch-off"])]))

case("tr-04-empty-hour", "time_related_trigger",
     expr("If nobody has been around for an hour, turn off the living room lights."),
     snap(),
     """
OPERATION: CREATE
NAME: NONE
TRIGGERS:
  T1 | STATE(1h) | nobody is active at home
ACTIONS:
  G1 WHEN T1:
    A1 | turn off the ceiling light
    A2 | turn off the sofa light
""",
     grounded([pair(["ActivitySensor-isThereUserActivity-false-state(1h)"],
                    ["ceiling light-switch-off", "sofa light-switch-off"])]),
     reasoning=["Sure. The rule:\nTRIGGERS:\n  T1 | after an hour | nobody is around\n",
                """
OPERATION: CREATE
NAME: NONE
TRIGGERS:
  T1 | STATE(1h) | nobody is active at home
ACTIONS:
  G1 WHEN T1:
    A1 | turn off the ceiling light
    A2 | turn off the sofa light
"""])

# ---------------------------------------------------------------------------
# Time-dependent action
# ---------------------------------------------------------------------------

COOL_DOWN = ["air conditioner-switch-on", "timer-wait-10mins", "air conditioner-switch-off"]
case("td-01-cool-down", "time_dependent_action",
     expr("Make a rule called cool down that turns on the air conditioner for 10 minutes."),
     snap(temperature=29),
     """
OPERATION: CREATE
NAME: cool down
TRIGGERS:
ACTIONS:
  G1 WHEN T0:
    A1 | turn on the air conditioner
    A2 | WAIT 10mins
    A3 | turn off the air conditioner
""",
     grounded([name_pair("cool down", COOL_DOWN)], name="cool down"))

case("td-02-kettle-cooking", "time_dependent_action",
     expr("When I start cooking, turn on the kettle and switch it off five minutes later."),
     snap(),
     """
OPERATION: CREATE
NAME: NONE
TRIGGERS:
  T1 | EVENT | the user starts cooking
ACTIONS:
  G1 WHEN T1:
    A1 | turn on the kettle
    A2 | WAIT 5mins
    A3 | turn off the kettle
""",
     grounded([pair(["ActivitySensor-userActivity-cooking-event"],
                    ["kettle-switch-on", "timer-wait-5mins", "kettle-switch-off"])]))

case("td-03-robot-leave", "time_dependent_action",
     expr("When I head out the front door, wait ten minutes, start the cleaning robot and stop it after an hour."),
     snap(time="09:00"),
     """
OPERATION: CREATE
NAME: NONE
TRIGGERS:
  T1 | EVENT | the front door opens
ACTIONS:
  G1 WHEN T1:
    A1 | WAIT 10mins
    A2 | start the cleaning robot
    A3 | WAIT 1h
    A4 | stop the cleaning robot
""",
     grounded([pair(["door sensor-door-open-event"],
                    ["timer-wait-10mins", "cleaning robot-cleaning-on", "timer-wait-1h", "cleaning robot-cleaning-off"])]))

case("td-04-music-fade", "time_dependent_action",
     expr("Play relaxing music when I lie down, turn the volume down to 10 after 20 minutes, "
          "then switch the speaker off 10 minutes later."),
     snap(time="22:30"),
     """
OPERATION: CREATE
NAME: NONE
TRIGGERS:
  T1 | EVENT | the user lies down
ACTIONS:
  G1 WHEN T1:
    A1 | play relaxing music on the speaker
    A2 | WAIT 20mins
    A3 | set the speaker volume to 10
    A4 | WAIT 10mins
    A5 | turn off the speaker
""",
     grounded([pair(["ActivitySensor-userPosture-lying-event"],
                    ["speaker-play-relaxing music", "timer-wait-20mins", "speaker-volume-10", "timer-wait-10mins",
                     "speaker-switch-off"])]))

# ---------------------------------------------------------------------------
# Combination
# ---------------------------------------------------------------------------

case("cm-01-sofa-evening", "combination",
     expr("When I sit here in the evening turn this on for two hours, and if it's raining close the curtains too.",
          posture="sits", position="sofa", gesture="points", target="TV"),
     snap(time="18:30"),
     """
OPERATION: CREATE
NAME: NONE
TRIGGERS:
  T1 | STATE | the user sits on the sofa
  T2 | STATE | it is 19:00 or later
  T3 | STATE | it is raining outside
ACTIONS:
  G1 WHEN T1,T2:
    A1 | turn on the TV
    A2 | WAIT 2h
    A3 | turn off the TV
  G2 WHEN T1,T2,T3:
    A1 | close the curtains
""",
     grounded([pair(["ActivitySensor-userPosture-sitting-state", "ActivitySensor-userLocation-sofa-state",
                     "clock-hour->=19-state"],
                    ["TV-switch-on", "timer-wait-2h", "TV-switch-off"]),
               pair(["ActivitySensor-userPosture-sitting-state", "ActivitySensor-userLocation-sofa-state",
                     "clock-hour->=19-state", "environment sensor-weather-raining-state"],
                    ["curtains-state-closed"])]))

MOVIE = ["ceiling light-brightness-20", "curtains-state-closed", "TV-switch-on"]
MOVIE_GOLD = grounded([
    name_pair("movie mode", MOVIE),
    pair(["ActivitySensor-userPosture-sitting-state", "ActivitySensor-userLocation-sofa-state",
          "clock-hour->=20-state"], MOVIE)], name="movie mode")
case("cm-02-movie-mode", "combination",
     expr("Create movie mode: when I say movie mode, or when I sit on the sofa after 8 pm, dim the ceiling light "
          "to 20 percent, close the curtains and turn on the TV."),
     snap(),
     """
OPERATION: CREATE
NAME: movie mode
TRIGGERS:
  T1 | STATE | the user sits on the sofa
  T2 | STATE | it is 20:00 or later
ACTIONS:
  G1 WHEN T0:
    A1 | set the ceiling light brightness to 20
    A2 | close the curtains
    A3 | turn on the TV
  G2 WHEN T1,T2:
    A1 | set the ceiling light brightness to 20
    A2 | close the curtains
    A3 | turn on the TV
""",
     MOVIE_GOLD,
     grounding=[json.dumps(without_name_pairs(MOVIE_GOLD), indent=2)])

# "applaud" is not a gesture the sensor knows; the model forces a value.
APPLAUD = grounded([pair(["gesture sensor-gesture-applaud-event"],
                         ["speaker-play-music", "timer-wait-30mins", "speaker-switch-off"])])
case("cm-03-applaud-music", "combination",
     expr("When I applaud, play music for half an hour.", posture="stands", position="sofa"),
     snap(),
     """
OPERATION: CREATE
NAME: NONE
TRIGGERS:
  T1 | EVENT | the user applauds
ACTIONS:
  G1 WHEN T1:
    A1 | play music on the speaker
    A2 | WAIT 30mins
    A3 | turn off the speaker
""",
     infeasible=["BAD_CONDITION"],
     grounding=["```json\n" + json.dumps(APPLAUD, indent=2) + "\n```"])

case("cm-04-weekday-morning", "combination",
     expr("Every weekday at 7, open the bedroom curtains, five minutes later start the kettle, "
          "and if it's raining tell me to take an umbrella."),
     snap(time="21:00", weekday="Sunday"),
     """
OPERATION: CREATE
NAME: NONE
TRIGGERS:
  T1 | EVENT | it is 07:00
  T2 | STATE | it is a weekday
  T3 | STATE | it is raining outside
ACTIONS:
  G1 WHEN T1,T2:
    A1 | open the bedroom curtains
    A2 | WAIT 5mins
    A3 | turn on the kettle
  G2 WHEN T1,T2,T3:
    A1 | say take an umbrella
""",
     grounded([pair(["clock-time-07:00-event", "clock-isWeekend-false-state"],
                    ["bedroom curtains-state-open", "timer-wait-5mins", "kettle-switch-on"]),
               pair(["clock-time-07:00-event", "clock-isWeekend-false-state", "environment sensor-weather-raining-state"],
                    ["VoiceAssistant-speak-take an umbrella"])]))


# ---------------------------------------------------------------------------
# Session flow: expression, modification, direct edit, confirm
# ---------------------------------------------------------------------------

# Round 1 names the rule but the model grounds "enters the bedroom" to an
# interface that does not exist; round 2 narrows the trigger by expression;
# round 3 fixes the trigger by editing the text.
FLOW_R1_NL = """
OPERATION: CREATE
NAME: night light
TRIGGERS:
  T1 | EVENT | the user enters the bedroom
  T2 | STATE | it is 22:00 or later
ACTIONS:
  G1 WHEN T1,T2:
    A1 | turn on the bedroom light
    A2 | set the bedroom light brightness to 30
"""
FLOW_R1_GROUNDED = grounded([
    pair(["environment sensor-UserEnter-bedroom-event", "clock-hour->=22-state"],
         ["bedroom light-switch-on", "bedroom light-brightness-30"])], name="night light")
FLOW_R2_NL = """
OPERATION: MODIFY
NAME: night light
TRIGGERS:
  T2 | STATE | it is 23:00 or later
ACTIONS:
"""
FLOW_R2_MERGED_GROUNDED = grounded([
    pair(["environment sensor-UserEnter-bedroom-event", "clock-hour->=23-state"],
         ["bedroom light-switch-on", "bedroom light-brightness-30"])], name="night light")
FLOW_EDIT = """OPERATION: CREATE
NAME: night light
TRIGGERS:
  T1 | STATE | the user is in bed
  T2 | STATE | it is 23:00 or later
ACTIONS:
  G1 WHEN T1,T2:
    A1 | turn on the bedroom light
    A2 | set the bedroom light brightness to 30
"""
FLOW_EDIT_GROUNDED = grounded([
    pair(["ActivitySensor-userLocation-bed-state", "clock-hour->=23-state"],
         ["bedroom light-switch-on", "bedroom light-brightness-30"]),
    name_pair("night light", ["bedroom light-switch-on", "bedroom light-brightness-30"])], name="night light")

FLOW = {
    "rounds": [
        {"kind": "expression",
         "body": {"expression": expr("Call it night light: when I go into the bedroom at night, turn on the bedroom "
                                     "light at 30 percent."),
                  "snapshot": snap(time="21:30")},
         "reasoning": [FLOW_R1_NL.strip() + "\n"],
         "grounding": [json.dumps(FLOW_R1_GROUNDED, indent=2)],
         "expect": {"feasible": False, "codes": ["UNKNOWN_INTERFACE"]}},
        {"kind": "expression",
         "body": {"expression": expr("Actually, only after eleven."), "snapshot": snap(time="21:31")},
         "reasoning": [FLOW_R2_NL.strip() + "\n"],
         "grounding": [json.dumps(FLOW_R2_MERGED_GROUNDED, indent=2)],
         "expect": {"feasible": False, "codes": ["UNKNOWN_INTERFACE"]}},
        {"kind": "edit",
         "body": {"document": FLOW_EDIT},
         "reasoning": [],
         "grounding": [json.dumps(without_name_pairs(FLOW_EDIT_GROUNDED), indent=2)],
         "expect": {"feasible": True, "codes": []}},
    ],
    "expected_rule": FLOW_EDIT_GROUNDED,
    "expected_rounds": 3,
}


def main():
    (DATA / "catalog").mkdir(parents=True, exist_ok=True)
    (DATA / "corpus").mkdir(parents=True, exist_ok=True)
    (DATA / "sessions").mkdir(parents=True, exist_ok=True)
    (DATA / "catalog" / "living_room.json").write_text(json.dumps(CATALOG, indent=2) + "\n")
    (DATA / "corpus" / "bundled.json").write_text(json.dumps(CASES, indent=2) + "\n")
    (DATA / "corpus" / "responses.json").write_text(json.dumps(RESPONSES, indent=2) + "\n")
    (DATA / "sessions" / "night_light.json").write_text(json.dumps(FLOW, indent=2) + "\n")
    counts = {}
    for c in CASES:
        counts[c["complexity"]] = counts.get(c["complexity"], 0) + 1
    assert len(CATALOG["devices"]) == 18
    print(f"{len(CASES)} cases:", ", ".join(f"{k}={v}" for k, v in counts.items()))


if __name__ == "__main__":
    main()
