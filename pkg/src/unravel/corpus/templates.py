"""Template grammar for synthetic clinical sentences.

Sentences are written pre-tokenized (space-separated lowercase tokens).
Slots: {kw} is the keyword phrase, the rest draw from the filler lexicon.
Carrier templates come in an affirmative and a negated flavor; part of the
negated flavor intentionally places the trigger outside the negation
detector's scope window, which is what produces label noise downstream.
"""

from __future__ import annotations

from dataclasses import dataclass, field

# Filler lexicon. Keyword and trigger tokens are deliberately absent so
# distractor sentences can never leak label signal.
NOUNS = (
    "admission", "airway", "allergies", "ambulation", "analgesia", "appetite",
    "arrhythmia", "aspiration", "assessment", "asthma", "balance", "baseline",
    "bleeding", "breakfast", "bruising", "catheter", "chart", "checklist",
    "clearance", "clinic", "cognition", "comfort", "communication", "consent",
    "constipation", "continence", "coordination", "cough", "counseling",
    "culture", "cultures", "debridement", "dehydration", "delirium",
    "dialysis", "diet", "dinner", "discharge", "discomfort", "dizziness",
    "documentation", "drainage", "dressing", "echo", "edema", "education",
    "electrolytes", "elevation", "endoscopy", "equipment", "evaluation",
    "examination", "exercise", "fatigue", "fistula", "fluids", "followup",
    "fracture", "gait", "glucose", "guidance", "handoff", "headache",
    "hearing", "hemoglobin", "hydration", "hygiene", "hypertension",
    "imaging", "immunization", "incision", "independence", "infusion",
    "insulin", "intake", "intubation", "laceration", "labs", "lesion",
    "lethargy", "lunch", "mattress", "meals", "measurement", "medication",
    "migraine", "mobility", "mobilization", "monitor", "nausea", "nebulizer",
    "neuropathy", "nutrition", "observation", "optimization", "orders",
    "orientation", "osteoporosis", "oximetry", "oxygen", "pain", "paperwork",
    "pathology", "perfusion", "physiotherapy", "placement", "platelets",
    "pneumothorax", "polyp", "posture", "potassium", "precautions",
    "preparation", "pressure", "progress", "prophylaxis", "protocol", "pulse",
    "radiograph", "readiness", "reassessment", "recovery", "referral",
    "regimen", "rehabilitation", "reminder", "report", "respiration",
    "restraint", "resuscitation", "review", "rhythm", "rotation", "rounds",
    "saline", "sanitation", "saturation", "scan", "schedule", "screening",
    "sedation", "seizure", "signoff", "sleep", "sodium", "specimen", "splint",
    "sputum", "stability", "staffing", "stairs", "stamina", "stiffness",
    "strength", "suction", "supervision", "supplement", "supplies", "suture",
    "swallowing", "swelling", "symptom", "tapering", "telemetry",
    "temperature", "therapy", "titration", "toileting", "tolerance",
    "tracing", "traction", "transfer", "transfusion", "transport", "tremor",
    "triage", "turning", "ulcer", "ultrasound", "urinalysis", "ventilation",
    "vertigo", "vision", "vitals", "vomiting", "walker", "walking", "ward",
    "weakness", "weaning", "weight", "wheelchair", "workup", "wound", "xray",
)

VERBS = (
    "adjusted", "administered", "advanced", "ambulated", "appeared",
    "arranged", "assessed", "assisted", "attempted", "charted", "checked",
    "cleaned", "cleared", "completed", "confirmed", "continued",
    "coordinated", "decreased", "delivered", "demonstrated", "discussed",
    "documented", "dosed", "drained", "encouraged", "escorted", "evaluated",
    "explained", "finished", "fluctuated", "followed", "held", "improved",
    "increased", "initiated", "inspected", "instructed", "irrigated",
    "logged", "maintained", "managed", "measured", "monitored", "normalized",
    "noted", "observed", "obtained", "offered", "ordered", "organized",
    "performed", "persisted", "planned", "positioned", "prepared",
    "prescribed", "progressed", "provided", "reassessed", "recommended",
    "recorded", "remained", "repeated", "replaced", "repositioned",
    "requested", "required", "rescheduled", "resolved", "responded",
    "restarted", "resumed", "reviewed", "revised", "settled", "stabilized",
    "started", "supervised", "supported", "tapered", "titrated", "tolerated",
    "trended", "updated", "verified", "worsened",
)

ADJECTIVES = (
    "acceptable", "active", "acute", "adequate", "afebrile", "ambulatory",
    "anxious", "appropriate", "asymptomatic", "attentive", "benign",
    "bilateral", "bland", "brisk", "calm", "cautious", "chronic", "clear",
    "comfortable", "consistent", "cooperative", "current", "diffuse",
    "diminished", "distal", "drowsy", "dry", "dull", "elderly", "elective",
    "elevated", "faint", "fair", "favorable", "firm", "focal", "formal",
    "fragile", "frequent", "gentle", "gradual", "guarded", "healthy",
    "hoarse", "inconsistent", "intact", "intermittent", "irregular",
    "labile", "lateral", "lean", "localized", "loose", "low", "lower",
    "mild", "minimal", "mobile", "moderate", "modest", "moist", "mottled",
    "muffled", "nontender", "normal", "notable", "occasional", "optimal",
    "oral", "organized", "oriented", "pale", "partial", "patent",
    "peripheral", "persistent", "pleasant", "postoperative", "preliminary",
    "prior", "productive", "prolonged", "prompt", "proximal", "quiet",
    "rapid", "recent", "reduced", "regular", "reliable", "resting",
    "restless", "routine", "satisfactory", "scant", "severe", "slight",
    "slow", "soft", "sore", "sparse", "stable", "steady", "sterile",
    "strong", "subtle", "supple", "symmetric", "tender", "tepid", "thin",
    "tight", "tired", "tolerable", "unchanged", "uneventful", "unremarkable",
    "upper", "upright", "variable", "warm", "weak",
)

ADVERBS = (
    "accordingly", "adequately", "briefly", "briskly", "carefully",
    "cautiously", "closely", "comfortably", "consistently", "continuously",
    "currently", "diligently", "early", "easily", "effectively", "evenly",
    "frequently", "gently", "gradually", "independently", "intermittently",
    "lightly", "markedly", "mildly", "minimally", "moderately", "modestly",
    "noticeably", "occasionally", "overnight", "partially", "periodically",
    "promptly", "quickly", "quietly", "regularly", "reliably", "safely",
    "significantly", "slightly", "slowly", "smoothly", "somewhat",
    "steadily", "thoroughly", "typically", "visibly", "willingly",
)

SITES = (
    "abdomen", "ankle", "arm", "back", "bathroom", "bay", "bedside",
    "bladder", "calf", "chest", "corridor", "doorway", "ear", "elbow",
    "eye", "face", "finger", "flank", "foot", "forearm", "forehead",
    "groin", "hallway", "hand", "head", "heel", "hip", "jaw", "knee",
    "leg", "limb", "lung", "mouth", "neck", "nose", "palm", "pelvis",
    "rib", "room", "scalp", "shin", "shoulder", "side", "sole", "spine",
    "sternum", "thigh", "throat", "thumb", "toe", "torso", "trunk", "unit",
    "wrist",
)

TIMES = (
    "afternoon", "dawn", "dayshift", "dusk", "evening", "friday",
    "midday", "midmorning", "midnight", "monday", "morning", "nightshift",
    "noon", "saturday", "sunday", "thursday", "tuesday", "wednesday",
    "weekday", "weekend", "yesterday",
)

SLOT_LEXICON: dict[str, tuple[str, ...]] = {
    "n": NOUNS,
    "v": VERBS,
    "adj": ADJECTIVES,
    "adv": ADVERBS,
    "site": SITES,
    "time": TIMES,
}

DISTRACTOR_TEMPLATES = (
    "the {n} was {adj} this {time} .",
    "patient {v} {adv} after {n} .",
    "nursing staff {v} the {n} .",
    "{n} and {n} were {v} .",
    "the {adj} {n} remained {adj} .",
    "{v} {n} in the {site} .",
    "team {v} the {n} plan .",
    "patient rested {adv} in the room .",
    "{n} was {v} by the {time} shift .",
    "the {site} dressing appeared {adj} .",
    "family visited and {v} {n} .",
    "repeat {n} {v} a {adj} trend .",
    "the patient {v} the {n} .",
    "new {n} concerns were {v} .",
    "bedside {n} showed {adj} {n} .",
    "{adv} {v} {n} levels .",
    "the team {v} {n} scheduling .",
    "charting was {v} {adv} .",
    "patient moved to the {site} {adv} .",
    "routine {n} continued with {adj} {n} .",
    "the {n} pump was {v} twice .",
    "{n} , {n} , and {n} were {adj} .",
    "spouse asked about {n} timing .",
    "overall the {time} went {adv} .",
)

AFFIRMATIVE_CARRIER_TEMPLATES = (
    "patient is suffering from {kw}",
    "the patient developed {kw} overnight .",
    "exam findings are consistent with {kw} .",
    "{kw} was noted on admission .",
    "ongoing {kw} documented again this {time} .",
    "labs this morning confirm {kw} .",
    "assessment shows {kw} at this time .",
    "nursing flagged {kw} during the {time} round .",
    "denies discomfort but {kw} persists .",
    "chart review reveals {kw} present since {time} .",
)

# Triggers here sit directly in front of the keyword, inside the detector's
# five-token window with nothing breaking the scope.
NEGATED_CARRIER_TEMPLATES = (
    "no signs of {kw} were found .",
    "no {kw} at this time .",
    "patient denies {kw} this {time} .",
    "without {kw} or related findings .",
    "negative for {kw} on repeat testing .",
    "ruled out {kw} after {adj} review .",
    "unlikely to be {kw} per the team .",
)

# Also negated in intent, but the trigger is out of the detector's reach:
# too far ahead of the keyword, behind it, or cut off by punctuation.
NEGATED_MISS_CARRIER_TEMPLATES = (
    "not currently showing any convincing overt evidence of {kw} .",
    "no clear clinical or laboratory evidence to suggest {kw} .",
    "{kw} was ruled out on further review .",
    "{kw} considered unlikely at this point .",
    "denies chills , sweats , or any {kw} .",
)


@dataclass(frozen=True)
class TemplateGrammar:
    distractor_templates: tuple[str, ...] = DISTRACTOR_TEMPLATES
    affirmative_templates: tuple[str, ...] = AFFIRMATIVE_CARRIER_TEMPLATES
    negated_templates: tuple[str, ...] = NEGATED_CARRIER_TEMPLATES
    negated_miss_templates: tuple[str, ...] = NEGATED_MISS_CARRIER_TEMPLATES
    slot_lexicon: dict[str, tuple[str, ...]] = field(
        default_factory=lambda: dict(SLOT_LEXICON)
    )

    def carrier_templates(self) -> tuple[str, ...]:
        return (
            self.affirmative_templates
            + self.negated_templates
            + self.negated_miss_templates
        )

    def noise_tokens(self) -> frozenset[str]:
        return frozenset(w for words in self.slot_lexicon.values() for w in words)


def default_templates() -> TemplateGrammar:
    return TemplateGrammar()
