"""Builds the synthetic MultiWOZ 2.2-layout fixture corpus used by the tests."""
import json, os, sys

OUT = sys.argv[1]

AREA = ["centre", "east", "north", "south", "west"]
PRICE = ["cheap", "expensive", "moderate"]
DAYS = ["monday", "tuesday", "wednesday", "thursday", "friday", "saturday", "sunday"]
PEOPLE = [str(i) for i in range(1, 9)]
STATIONS = ["birmingham new street", "bishops stortford", "broxbourne", "cambridge", "ely",
            "kings lynn", "leicester", "london kings cross", "london liverpool street",
            "norwich", "peterborough", "stansted airport", "stevenage"]
ATTR_TYPES = ["architecture", "boat", "cinema", "college", "concerthall", "entertainment",
              "museum", "multiple sports", "nightclub", "park", "swimmingpool", "theatre"]


def slot(svc, name, cat=False, values=None, desc=""):
    return {"name": f"{svc}-{name}", "description": desc or f"{name} of the {svc}",
            "is_categorical": cat, "possible_values": values or []}


SCHEMA = [
    {"service_name": "restaurant", "slots": [
        slot("restaurant", "pricerange", True, PRICE), slot("restaurant", "area", True, AREA),
        slot("restaurant", "food"), slot("restaurant", "name"),
        slot("restaurant", "bookday", True, DAYS), slot("restaurant", "bookpeople", True, PEOPLE),
        slot("restaurant", "booktime"), slot("restaurant", "address"),
        slot("restaurant", "phone"), slot("restaurant", "postcode"), slot("restaurant", "ref")]},
    {"service_name": "hotel", "slots": [
        slot("hotel", "pricerange", True, PRICE), slot("hotel", "type", True, ["guesthouse", "hotel"]),
        slot("hotel", "parking", True, ["free", "no", "yes"]),
        slot("hotel", "bookday", True, DAYS), slot("hotel", "bookpeople", True, PEOPLE),
        slot("hotel", "bookstay", True, PEOPLE),
        slot("hotel", "stars", True, [str(i) for i in range(6)]),
        slot("hotel", "internet", True, ["free", "no", "yes"]), slot("hotel", "name"),
        slot("hotel", "area", True, AREA), slot("hotel", "address"), slot("hotel", "phone"),
        slot("hotel", "postcode"), slot("hotel", "ref")]},
    {"service_name": "attraction", "slots": [
        slot("attraction", "area", True, AREA), slot("attraction", "name"),
        slot("attraction", "type", True, ATTR_TYPES), slot("attraction", "entrancefee"),
        slot("attraction", "openhours"), slot("attraction", "address"),
        slot("attraction", "phone"), slot("attraction", "postcode")]},
    {"service_name": "train", "slots": [
        slot("train", "arriveby"), slot("train", "departure", True, STATIONS),
        slot("train", "day", True, DAYS), slot("train", "bookpeople", True, PEOPLE + ["0", "9", "10", "15"]),
        slot("train", "leaveat"), slot("train", "destination", True, STATIONS),
        slot("train", "trainid"), slot("train", "ref"), slot("train", "price"),
        slot("train", "duration")]},
    {"service_name": "taxi", "slots": [
        slot("taxi", "leaveat"), slot("taxi", "destination"), slot("taxi", "departure"),
        slot("taxi", "arriveby"), slot("taxi", "type"), slot("taxi", "phone")]},
    {"service_name": "hospital", "slots": [
        slot("hospital", "department"), slot("hospital", "address"), slot("hospital", "phone"),
        slot("hospital", "postcode")]},
    {"service_name": "police", "slots": [
        slot("police", "address"), slot("police", "phone"), slot("police", "name"),
        slot("police", "postcode")]},
    {"service_name": "bus", "slots": [
        slot("bus", "departure"), slot("bus", "destination"), slot("bus", "day"),
        slot("bus", "leaveat")]},
]

INTENT = {"restaurant": "find_restaurant", "hotel": "find_hotel", "attraction": "find_attraction",
          "train": "find_train", "taxi": "book_taxi", "hospital": "find_hospital",
          "police": "find_police"}


def build(did, services, exchanges):
    """exchanges: list of (user, state, requested, user_acts, system, system_acts)."""
    turns, acts = [], {}
    for i, (u, state, req, uacts, s, sacts) in enumerate(exchanges):
        frames = []
        for svc in services:
            sv = {f"{svc}-{k}": (v if isinstance(v, list) else [v])
                  for k, v in state.get(svc, {}).items()}
            frames.append({"actions": [], "service": svc, "slots": [], "state": {
                "active_intent": INTENT[svc] if sv or req.get(svc) else "NONE",
                "requested_slots": [f"{svc}-{k}" for k in req.get(svc, [])],
                "slot_values": sv}})
        uid, sid = str(2 * i), str(2 * i + 1)
        turns.append({"frames": frames, "speaker": "USER", "turn_id": uid, "utterance": u})
        turns.append({"frames": [{"actions": [], "service": svc, "slots": []} for svc in services],
                      "speaker": "SYSTEM", "turn_id": sid, "utterance": s})
        if uacts:
            acts[uid] = {"dialog_act": uacts, "span_info": []}
        if sacts:
            acts[sid] = {"dialog_act": sacts, "span_info": []}
    return {"dialogue_id": did, "services": services, "turns": turns}, acts


BYE = {"general-bye": [["none", "none"]]}
THANK = {"general-thank": [["none", "none"]]}

TEST = []
GOALS = {}

# Venue-count context and phone request, then booking and closing.
r1 = {"area": ["centre", "center"], "pricerange": "expensive"}
r2 = {"area": ["centre", "center"], "pricerange": "expensive", "food": "dontcare"}
r3 = dict(r2, name="curry garden", bookpeople="5", bookday="wednesday", booktime="19:45")
TEST.append(build("SNG90001.json", ["restaurant"], [
    ("I need a place to dine in the center thats expensive", {"restaurant": r1}, {},
     {"Restaurant-Inform": [["area", "centre"], ["pricerange", "expensive"]]},
     "I have several options for you; do you prefer African, Asian, or British food?",
     {"Restaurant-Inform": [["choice", "several"]],
      "Restaurant-Select": [["food", "African"], ["food", "Asian"], ["food", "British"]]}),
    ("Any sort of food would be fine, as long as it is a bit expensive. Could I get the phone number for your recommendation?",
     {"restaurant": r2}, {"restaurant": ["phone"]},
     {"Restaurant-Inform": [["food", "dontcare"]], "Restaurant-Request": [["phone", "?"]]},
     "Curry Garden is an Indian restaurant in the centre. Their phone number is 01223302330.",
     {"Restaurant-Recommend": [["name", "Curry Garden"], ["food", "Indian"], ["area", "centre"], ["phone", "01223302330"]]}),
    ("Great, please book a table for 5 people on wednesday at 19:45.", {"restaurant": r3}, {},
     {"Restaurant-Inform": [["people", "5"], ["day", "wednesday"], ["time", "19:45"]]},
     "Booking was successful. The table will be reserved for 15 minutes. Reference number is : 9QZ3YHLB.",
     {"Booking-Book": [["ref", "9QZ3YHLB"]]}),
    ("Thank you, that is all I need.", {"restaurant": r3}, {}, THANK,
     "You're welcome. Have a great day!", BYE),
]))
GOALS["SNG90001.json"] = {"restaurant": {"info": {"area": "centre", "pricerange": "expensive"},
                                         "reqt": ["phone"],
                                         "book": {"people": "5", "day": "wednesday", "time": "19:45"}}}

# Attraction then restaurant; gold tracks a venue named by the system.
a1 = {"name": "corpus christi"}
a2 = {"name": "corpus christi", "type": "college"}
rb = {"area": "centre", "food": "african"}
rc = {"area": "centre", "food": "african", "name": "bedouin", "pricerange": "expensive"}
TEST.append(build("MUL90002.json", ["attraction", "restaurant"], [
    ("My friends said that I must visit Corpus Christi, can you please give me some more information about it?",
     {"attraction": a1}, {}, {"Attraction-Inform": [["name", "corpus christi"]]},
     "I certainly can. Corpus Christi is a college located in the center of town, on King's Parade. There's a two pound entrance fee. Do you need any additional information?",
     {"Attraction-Inform": [["name", "Corpus Christi"], ["type", "college"], ["area", "center"], ["address", "King's Parade"], ["fee", "two pound"]]}),
    ("Yes. What is the postcode?", {"attraction": a2}, {"attraction": ["postcode"]},
     {"Attraction-Request": [["postcode", "?"]]},
     "The postcode is cb21rh. Do you need anything else?",
     {"Attraction-Inform": [["postcode", "cb21rh"]]}),
    ("Are there any African restaurants in the centre?", {"attraction": a2, "restaurant": rb}, {},
     {"Restaurant-Inform": [["food", "african"], ["area", "centre"]]},
     "I have one listing for bedouin would that work for you?",
     {"Restaurant-Inform": [["choice", "one"], ["name", "bedouin"]]}),
    ("Is this listing in the expensive price range?", {"attraction": a2, "restaurant": rc}, {},
     {"Restaurant-Inform": [["pricerange", "expensive"]]},
     "Yes, bedouin is in the expensive price range. Would you like the address?",
     {"Restaurant-Inform": [["name", "bedouin"], ["pricerange", "expensive"]]}),
    ("Yes, please give me the address.", {"attraction": a2, "restaurant": rc}, {"restaurant": ["address"]},
     {"Restaurant-Request": [["address", "?"]]},
     "Bedouin is located at 100 Mill Road City Centre. Anything else?",
     {"Restaurant-Inform": [["name", "Bedouin"], ["address", "100 Mill Road City Centre"]]}),
    ("No, that is all. Thanks!", {"attraction": a2, "restaurant": rc}, {}, THANK,
     "Thank you for contacting us. Goodbye.", BYE),
]))
GOALS["MUL90002.json"] = {"attraction": {"info": {"name": "corpus christi"}, "reqt": ["postcode"], "book": {}},
                          "restaurant": {"info": {"food": "african", "area": "centre", "pricerange": "expensive"},
                                         "reqt": ["address"], "book": {}}}

# Name given up front; booking and closing.
s1 = {"name": "saigon city"}
s2 = dict(s1, bookpeople="5", bookday="wednesday", booktime="19:45")
TEST.append(build("SNG90003.json", ["restaurant"], [
    ("I would like to try saigon city.", {"restaurant": s1}, {}, {"Restaurant-Inform": [["name", "saigon city"]]},
     "great choice. when can i make the reservation for?",
     {"Booking-Request": [["day", "?"], ["time", "?"]]}),
    ("5 people on a Wednesday at 19:45.", {"restaurant": s2}, {},
     {"Restaurant-Inform": [["people", "5"], ["day", "wednesday"], ["time", "19:45"]]},
     "you got it. here is your reference number: 5H8Q2W9E.",
     {"Booking-Book": [["ref", "5H8Q2W9E"]]}),
    ("Thank you for help. That's everything I needed.", {"restaurant": s2}, {}, THANK,
     "Have a great day!", BYE),
]))
GOALS["SNG90003.json"] = {"restaurant": {"info": {"name": "saigon city"}, "reqt": [],
                                         "book": {"people": "5", "day": "wednesday", "time": "19:45"}}}

# Train with booking.
t1 = {"departure": "cambridge", "destination": "london kings cross", "day": "monday", "leaveat": "05:00"}
t2 = dict(t1, bookpeople="2")
TEST.append(build("SNG90004.json", ["train"], [
    ("I need a train from cambridge to london kings cross on monday, leaving after 05:00.", {"train": t1}, {},
     {"Train-Inform": [["departure", "cambridge"], ["destination", "london kings cross"], ["day", "monday"], ["leaveat", "05:00"]]},
     "TR7075 leaves at 05:00 and arrives at 05:51. Would you like me to book it?",
     {"Train-Inform": [["id", "TR7075"], ["leaveat", "05:00"], ["arriveby", "05:51"]], "Train-OfferBook": [["none", "none"]]}),
    ("Yes, book it for 2 people. What is the price?", {"train": t2}, {"train": ["price"]},
     {"Train-Inform": [["people", "2"]], "Train-Request": [["price", "?"]]},
     "Booking was successful, the total fee is 47.2 GBP payable at the station. Each ticket is 23.60 pounds. Reference number is : 8X2KQ4ZP.",
     {"Train-OfferBooked": [["ref", "8X2KQ4ZP"], ["price", "23.60 pounds"]]}),
    ("Thanks, goodbye.", {"train": t2}, {}, BYE, "Goodbye, have a nice trip.", BYE),
]))
GOALS["SNG90004.json"] = {"train": {"info": {"departure": "cambridge", "destination": "london kings cross",
                                             "day": "monday", "leaveAt": "05:00"},
                                    "reqt": ["price"], "book": {"people": "2"}}}

# Attraction by area, then a taxi from it.
c1 = {"area": "centre"}
c2 = {"area": "centre", "name": "the fitzwilliam museum"}
x1 = {"departure": "the fitzwilliam museum", "destination": "curry garden", "leaveat": "17:00"}
TEST.append(build("MUL90005.json", ["attraction", "taxi"], [
    ("I am coming to visit and will be in the centre area. I would like an attraction to visit.",
     {"attraction": c1}, {}, {"Attraction-Inform": [["area", "centre"]]},
     "sure, how about the fitzwilliam museum?",
     {"Attraction-Recommend": [["name", "the fitzwilliam museum"]]}),
    ("Sounds interesting! What is the address?", {"attraction": c2}, {"attraction": ["address"]},
     {"Attraction-Request": [["address", "?"]]},
     "Located at trumpington street .",
     {"Attraction-Inform": [["address", "trumpington street"]]}),
    ("I also need a taxi from there to curry garden, leaving at 17:00.", {"attraction": c2, "taxi": x1}, {},
     {"Taxi-Inform": [["departure", "the fitzwilliam museum"], ["destination", "curry garden"], ["leaveat", "17:00"]]},
     "Booked! Your car is a blue toyota and the contact number is 07218068540.",
     {"Taxi-Inform": [["type", "blue toyota"], ["phone", "07218068540"]]}),
    ("Thanks, that's all.", {"attraction": c2, "taxi": x1}, {}, THANK, "Enjoy your visit. Goodbye!", BYE),
]))
GOALS["MUL90005.json"] = {"attraction": {"info": {"area": "centre"}, "reqt": ["address"], "book": {}},
                          "taxi": {"info": {"departure": "the fitzwilliam museum", "destination": "curry garden",
                                            "leaveAt": "17:00"}, "reqt": ["car type", "phone"], "book": {}}}

# Hotel search with booking and phone.
h1 = {"pricerange": "cheap", "type": "guesthouse", "area": "north", "parking": "yes"}
h2 = dict(h1, name="worth house", bookpeople="3", bookstay="2", bookday="saturday")
TEST.append(build("SNG90006.json", ["hotel"], [
    ("I'm looking for a cheap guesthouse in the north with free parking.", {"hotel": h1}, {},
     {"Hotel-Inform": [["pricerange", "cheap"], ["type", "guesthouse"], ["area", "north"], ["parking", "yes"]]},
     "There are 2 options. Worth House is a cheap guesthouse in the north. Would you like to book it?",
     {"Hotel-Inform": [["choice", "2"]], "Hotel-Recommend": [["name", "Worth House"], ["pricerange", "cheap"], ["type", "guesthouse"], ["area", "north"]]}),
    ("Yes please, for 3 people for 2 nights starting saturday.", {"hotel": h2}, {},
     {"Hotel-Inform": [["people", "3"], ["stay", "2"], ["day", "saturday"]]},
     "Your booking is confirmed. The reference number is 2WQ7XK1M.",
     {"Booking-Book": [["ref", "2WQ7XK1M"]]}),
    ("What's the phone number?", {"hotel": h2}, {"hotel": ["phone"]},
     {"Hotel-Request": [["phone", "?"]]},
     "The phone number is 01223316074.", {"Hotel-Inform": [["phone", "01223316074"]]}),
    ("That's all, bye.", {"hotel": h2}, {}, BYE, "Goodbye!", BYE),
]))
GOALS["SNG90006.json"] = {"hotel": {"info": {"pricerange": "cheap", "type": "guesthouse", "area": "north",
                                             "parking": "yes"}, "reqt": ["phone"],
                                    "book": {"people": "3", "stay": "2", "day": "saturday"}}}

DEV = []
d1 = {"area": "centre", "food": "italian", "pricerange": "cheap"}
DEV.append(build("SNG90201.json", ["restaurant"], [
    ("Can you find me a cheap italian restaurant in the centre?", {"restaurant": d1}, {},
     {"Restaurant-Inform": [["pricerange", "cheap"], ["food", "italian"], ["area", "centre"]]},
     "There are 3 of those. Pizza Hut City Centre is a good one. Shall I book it?",
     {"Restaurant-Inform": [["choice", "3"]], "Restaurant-Recommend": [["name", "Pizza Hut City Centre"]]}),
    ("What is the postcode?", {"restaurant": d1}, {"restaurant": ["postcode"]},
     {"Restaurant-Request": [["postcode", "?"]]},
     "The postcode is cb21ab.", {"Restaurant-Inform": [["postcode", "cb21ab"]]}),
    ("Thanks, bye.", {"restaurant": d1}, {}, BYE, "Goodbye.", BYE),
]))
d2 = {"area": "centre", "pricerange": "expensive", "type": "hotel"}
DEV.append(build("SNG90202.json", ["hotel"], [
    ("I want an expensive hotel in the centre of town.", {"hotel": d2}, {},
     {"Hotel-Inform": [["pricerange", "expensive"], ["area", "centre"], ["type", "hotel"]]},
     "Gonville Hotel is a 3 star hotel in the centre. Would that work?",
     {"Hotel-Recommend": [["name", "Gonville Hotel"], ["stars", "3"]]}),
    ("Sure, what is the address?", {"hotel": d2}, {"hotel": ["address"]},
     {"Hotel-Request": [["address", "?"]]},
     "It is on gonville place.", {"Hotel-Inform": [["address", "gonville place"]]}),
    ("Thanks that's all.", {"hotel": d2}, {}, THANK, "Have a nice stay.", BYE),
]))

TRAIN = []
TRAIN.append(build("SNG90101.json", ["restaurant"], [
    ("I am looking for a chinese restaurant in the north.", {"restaurant": {"food": "chinese", "area": "north"}}, {},
     {"Restaurant-Inform": [["food", "chinese"], ["area", "north"]]},
     "There are 3 chinese restaurants in the north. Golden Wok is moderately priced. Would you like a table?",
     {"Restaurant-Inform": [["choice", "3"], ["food", "chinese"], ["area", "north"]],
      "Restaurant-Recommend": [["name", "Golden Wok"], ["pricerange", "moderately priced"]]}),
    ("No thanks, just the phone number.", {"restaurant": {"food": "chinese", "area": "north", "name": "golden wok"}},
     {"restaurant": ["phone"]}, {"Restaurant-Request": [["phone", "?"]]},
     "The phone number is 01223350688.", {"Restaurant-Inform": [["phone", "01223350688"]]}),
    ("Great, bye.", {"restaurant": {"food": "chinese", "area": "north", "name": "golden wok"}}, {}, BYE,
     "Goodbye.", BYE),
]))
TRAIN.append(build("SNG90102.json", ["hospital"], [
    ("I need the addenbrookes hospital, the neurosciences critical care unit department.",
     {"hospital": {"department": "neurosciences critical care unit"}}, {},
     {"Hospital-Inform": [["department", "neurosciences critical care unit"]]},
     "The phone number is 01223216297.", {"Hospital-Inform": [["phone", "01223216297"]]}),
    ("Thanks.", {"hospital": {"department": "neurosciences critical care unit"}}, {}, THANK, "Goodbye.", BYE),
]))
TRAIN.append(build("MUL90103.json", ["police", "taxi"], [
    ("I was robbed and need the nearest police station.", {}, {"police": ["address"]},
     {"Police-Request": [["address", "?"]]},
     "Parkside Police Station is at Parkside, Cambridge.", {"Police-Inform": [["name", "Parkside Police Station"], ["address", "Parkside, Cambridge"]]}),
    ("Book me a taxi there from worth house, leaving at 10:15.",
     {"taxi": {"departure": "worth house", "destination": "parkside police station", "leaveat": "10:15"}}, {},
     {"Taxi-Inform": [["departure", "worth house"], ["leaveat", "10:15"]]},
     "A black skoda is booked, contact number 07512345678.",
     {"Taxi-Inform": [["type", "black skoda"], ["phone", "07512345678"]]}),
    ("Thank you.", {"taxi": {"departure": "worth house", "destination": "parkside police station", "leaveat": "10:15"}},
     {}, THANK, "Goodbye.", BYE),
]))
TRAIN.append(build("MUL90104.json", ["attraction", "restaurant"], [
    ("Is there a museum in the centre?", {"attraction": {"type": "museum", "area": "centre"}}, {},
     {"Attraction-Inform": [["type", "museum"], ["area", "centre"]]},
     "There are 11 museums in the centre. What sort of museum do you like?",
     {"Attraction-Inform": [["choice", "11"]], "Attraction-Request": [["type", "?"]]}),
    ("Any of them, just pick one please.", {"attraction": {"type": "museum", "area": "centre"}}, {},
     {}, "Broughton House Gallery is free to enter.",
     {"Attraction-Recommend": [["name", "Broughton House Gallery"], ["fee", "free"]]}),
    ("I also want an expensive restaurant in the same area.",
     {"attraction": {"type": "museum", "area": "centre", "name": "broughton house gallery"},
      "restaurant": {"pricerange": "expensive", "area": "centre"}}, {},
     {"Restaurant-Inform": [["pricerange", "expensive"], ["area", "centre"]]},
     "There are 33 to choose from. Do you have a cuisine in mind?",
     {"Restaurant-Inform": [["choice", "33"]], "Restaurant-Request": [["food", "?"]]}),
    ("Indian food please.",
     {"attraction": {"type": "museum", "area": "centre", "name": "broughton house gallery"},
      "restaurant": {"pricerange": "expensive", "area": "centre", "food": "indian"}}, {},
     {"Restaurant-Inform": [["food", "indian"]]},
     "Curry Garden is a nice indian place.", {"Restaurant-Recommend": [["name", "Curry Garden"], ["food", "indian"]]}),
    ("Thanks, bye.",
     {"attraction": {"type": "museum", "area": "centre", "name": "broughton house gallery"},
      "restaurant": {"pricerange": "expensive", "area": "centre", "food": "indian"}}, {}, BYE, "Bye.", BYE),
]))
TRAIN.append(build("SNG90105.json", ["train"], [
    ("I need a train from ely to cambridge on friday. I want to arrive by 11:00.",
     {"train": {"departure": "ely", "destination": "cambridge", "day": "friday", "arriveby": "11:00"}}, {},
     {"Train-Inform": [["departure", "ely"], ["destination", "cambridge"], ["day", "friday"], ["arriveby", "11:00"]]},
     "There are 3 trains. TR3976 arrives at 09:52.",
     {"Train-Inform": [["choice", "3"], ["id", "TR3976"], ["arriveby", "09:52"]]}),
    ("How long is the ride?", {"train": {"departure": "ely", "destination": "cambridge", "day": "friday", "arriveby": "11:00"}},
     {"train": ["duration"]}, {"Train-Request": [["duration", "?"]]},
     "It takes 17 minutes.", {"Train-Inform": [["duration", "17 minutes"]]}),
    ("Thanks.", {"train": {"departure": "ely", "destination": "cambridge", "day": "friday", "arriveby": "11:00"}}, {},
     THANK, "Goodbye.", BYE),
]))
TRAIN.append(build("SNG90106.json", ["hotel"], [
    ("Find me a cheap guesthouse in the east please.", {"hotel": {"pricerange": "cheap", "type": "guesthouse", "area": "east"}}, {},
     {"Hotel-Inform": [["pricerange", "cheap"], ["type", "guesthouse"], ["area", "east"]]},
     "I have 3 options. Do you need free wifi?",
     {"Hotel-Inform": [["choice", "3"]], "Hotel-Request": [["internet", "?"]]}),
    ("Yes, with wifi.", {"hotel": {"pricerange": "cheap", "type": "guesthouse", "area": "east", "internet": "yes"}}, {},
     {"Hotel-Inform": [["internet", "yes"]]},
     "Allenbell is a 4 star guesthouse with free wifi.",
     {"Hotel-Recommend": [["name", "Allenbell"], ["stars", "4"], ["internet", "yes"]]}),
    ("Thanks.", {"hotel": {"pricerange": "cheap", "type": "guesthouse", "area": "east", "internet": "yes"}}, {},
     THANK, "Goodbye.", BYE),
]))


def write(split, items):
    os.makedirs(os.path.join(OUT, split), exist_ok=True)
    with open(os.path.join(OUT, split, "dialogues_001.json"), "w") as f:
        json.dump([d for d, _ in items], f, indent=2)
        f.write("\n")


os.makedirs(OUT, exist_ok=True)
with open(os.path.join(OUT, "schema.json"), "w") as f:
    json.dump(SCHEMA, f, indent=2)
    f.write("\n")
write("train", TRAIN)
write("dev", DEV)
write("test", TEST)
acts = {d["dialogue_id"]: a for d, a in TRAIN + DEV + TEST}
with open(os.path.join(OUT, "dialog_acts.json"), "w") as f:
    json.dump(acts, f, indent=2, sort_keys=True)
    f.write("\n")
with open(os.path.join(OUT, "goals.json"), "w") as f:
    json.dump(GOALS, f, indent=2, sort_keys=True)
    f.write("\n")
