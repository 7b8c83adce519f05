//! Declarative board description: slots, color groups, cards, dice and the
//! monetary constants. Engine and novelty transforms both operate on this.

use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::fmt;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

/// Currency units. Player cash never goes below zero.
pub type Money = i64;

const DEFAULT_BOARD: &str = include_str!("../data/us_board.json");

/// Tolerance used when checking that dice weights are normalized.
pub const WEIGHT_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BoardSchema {
    pub name: String,
    /// Index 0 is Go. Slot indices are list positions.
    pub slots: Vec<Slot>,
    /// Color name to the streets carrying it, in board order.
    pub color_groups: BTreeMap<String, Vec<String>>,
    pub dice: DiceConfig,
    pub go_increment: Money,
    pub card_decks: CardDecks,
    pub constants: Constants,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Slot {
    pub name: String,
    #[serde(flatten)]
    pub kind: SlotKind,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum SlotKind {
    Street(Street),
    Railroad {
        price: Money,
        /// Rent indexed by the number of railroads the owner holds, minus one.
        rents: Vec<Money>,
    },
    Utility {
        price: Money,
        /// Dice-sum multiplier indexed by the number of utilities owned, minus one.
        multipliers: Vec<Money>,
    },
    Tax {
        amount: Money,
    },
    Chance,
    CommunityChest,
    Go,
    Jail,
    FreeParking,
    GoToJail,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Street {
    pub color: String,
    pub price: Money,
    /// Rent by improvement level: unimproved, 1-4 houses, hotel, then any
    /// extra tiers a novelty appends.
    pub rents: Vec<Money>,
    /// `build_costs[i]` is the price of going from level `i` to `i + 1`.
    pub build_costs: Vec<Money>,
}

impl Street {
    pub fn max_level(&self) -> u8 {
        self.build_costs.len() as u8
    }
}

impl SlotKind {
    pub fn label(&self) -> &'static str {
        match self {
            SlotKind::Street(_) => "street",
            SlotKind::Railroad { .. } => "railroad",
            SlotKind::Utility { .. } => "utility",
            SlotKind::Tax { .. } => "tax",
            SlotKind::Chance => "chance",
            SlotKind::CommunityChest => "community-chest",
            SlotKind::Go => "go",
            SlotKind::Jail => "jail",
            SlotKind::FreeParking => "free-parking",
            SlotKind::GoToJail => "go-to-jail",
        }
    }

    pub fn price(&self) -> Option<Money> {
        match self {
            SlotKind::Street(s) => Some(s.price),
            SlotKind::Railroad { price, .. } | SlotKind::Utility { price, .. } => Some(*price),
            _ => None,
        }
    }

    pub fn is_purchasable(&self) -> bool {
        self.price().is_some()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Deck {
    Chance,
    CommunityChest,
}

impl fmt::Display for Deck {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Deck::Chance => "chance",
            Deck::CommunityChest => "community-chest",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CardDecks {
    pub chance: Vec<CardSpec>,
    pub community_chest: Vec<CardSpec>,
}

impl CardDecks {
    pub fn deck(&self, deck: Deck) -> &[CardSpec] {
        match deck {
            Deck::Chance => &self.chance,
            Deck::CommunityChest => &self.community_chest,
        }
    }

    pub fn deck_mut(&mut self, deck: Deck) -> &mut Vec<CardSpec> {
        match deck {
            Deck::Chance => &mut self.chance,
            Deck::CommunityChest => &mut self.community_chest,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CardSpec {
    pub text: String,
    pub effect: CardEffect,
    #[serde(default)]
    pub retained: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum NearestKind {
    Railroad,
    Utility,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "kebab-case")]
pub enum CardEffect {
    AdvanceTo { slot: String },
    /// Railroads charge double rent, utilities ten times the dice sum.
    AdvanceNearest { kind: NearestKind },
    Collect { amount: Money },
    Pay { amount: Money },
    PayEachPlayer { amount: Money },
    CollectFromEachPlayer { amount: Money },
    Repairs { per_house: Money, per_hotel: Money },
    GoToJail,
    GetOutOfJailFree,
    MoveBack { steps: u32 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DiceConfig {
    pub count: u32,
    pub faces: u32,
    /// Per-die face probabilities keyed by die index; dice absent here are fair.
    #[serde(default)]
    pub die_weights: BTreeMap<u32, Vec<f64>>,
}

impl Default for DiceConfig {
    fn default() -> Self {
        DiceConfig {
            count: 2,
            faces: 6,
            die_weights: BTreeMap::new(),
        }
    }
}

impl DiceConfig {
    /// Face probabilities of die `die` (index 0 is face 1).
    pub fn weights(&self, die: u32) -> Vec<f64> {
        match self.die_weights.get(&die) {
            Some(w) => w.clone(),
            None => vec![1.0 / self.faces as f64; self.faces as usize],
        }
    }

    /// Exact distribution of the dice sum, by enumeration of all outcomes.
    pub fn sum_distribution(&self) -> BTreeMap<u32, f64> {
        let mut dist = BTreeMap::from([(0u32, 1.0f64)]);
        for die in 0..self.count {
            let weights = self.weights(die);
            let mut next = BTreeMap::new();
            for (&sum, &p) in &dist {
                for (face, &w) in weights.iter().enumerate() {
                    if w > 0.0 {
                        *next.entry(sum + face as u32 + 1).or_insert(0.0) += p * w;
                    }
                }
            }
            dist = next;
        }
        dist
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Constants {
    pub jail_fine: Money,
    pub mortgage_ratio: f64,
    pub unmortgage_surcharge: f64,
    pub improvement_sell_ratio: f64,
    pub starting_cash: Money,
    /// Improvement levels at or above this count as a hotel.
    pub hotel_level: u8,
    /// Bank housing stock; `None` is unlimited.
    pub max_houses: Option<u32>,
    pub max_hotels: Option<u32>,
}

impl Default for Constants {
    fn default() -> Self {
        Constants {
            jail_fine: 50,
            mortgage_ratio: 0.5,
            unmortgage_surcharge: 0.1,
            improvement_sell_ratio: 0.5,
            starting_cash: 1500,
            hotel_level: 5,
            max_houses: None,
            max_hotels: None,
        }
    }
}

/// One broken invariant, naming the offending slot/card/field.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Violation {
    pub subject: String,
    pub rule: String,
}

impl Violation {
    fn new(subject: impl Into<String>, rule: impl Into<String>) -> Self {
        Violation {
            subject: subject.into(),
            rule: rule.into(),
        }
    }
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.subject, self.rule)
    }
}

#[derive(Debug, Error)]
pub enum SchemaError {
    #[error("schema format error at line {line}, column {column}: {message}")]
    Format {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("schema has {} violation(s): {}", .0.len(), join_violations(.0))]
    Invalid(Vec<Violation>),
}

fn join_violations(v: &[Violation]) -> String {
    v.iter().map(|v| v.to_string()).collect::<Vec<_>>().join("; ")
}

/// Parses and validates a schema document.
pub fn load_schema(source: &str) -> Result<BoardSchema, SchemaError> {
    let schema: BoardSchema = serde_json::from_str(source).map_err(|e| SchemaError::Format {
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    })?;
    let violations = validate_schema(&schema);
    if violations.is_empty() {
        Ok(schema)
    } else {
        Err(SchemaError::Invalid(violations))
    }
}

impl BoardSchema {
    /// The published US layout.
    pub fn us_default() -> BoardSchema {
        load_schema(DEFAULT_BOARD).expect("bundled board is valid")
    }

    pub fn default_document() -> &'static str {
        DEFAULT_BOARD
    }

    /// Sorted-key pretty JSON with a trailing newline; byte-stable.
    pub fn to_canonical_json(&self) -> String {
        let value = serde_json::to_value(self).expect("schema serializes");
        canonical_json(&value)
    }

    /// Hex SHA-256 of the canonical document.
    pub fn content_hash(&self) -> String {
        hex::encode(Sha256::digest(self.to_canonical_json().as_bytes()))
    }

    pub fn slot_count(&self) -> usize {
        self.slots.len()
    }

    /// First index of a slot with this name.
    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.slots.iter().position(|s| s.name == name)
    }

    pub fn jail_index(&self) -> Option<usize> {
        self.slots.iter().position(|s| s.kind == SlotKind::Jail)
    }

    pub fn slot_by_name(&self, name: &str) -> Option<&Slot> {
        self.slots.iter().find(|s| s.name == name)
    }

    pub fn street(&self, name: &str) -> Option<&Street> {
        match self.slot_by_name(name).map(|s| &s.kind) {
            Some(SlotKind::Street(street)) => Some(street),
            _ => None,
        }
    }

    /// Distinct purchasable properties in board order. Replicated slots
    /// (from an extend novelty) share a name and count once.
    pub fn properties(&self) -> Vec<&Slot> {
        let mut seen = BTreeSet::new();
        self.slots
            .iter()
            .filter(|s| s.kind.is_purchasable() && seen.insert(s.name.as_str()))
            .collect()
    }

    pub fn mortgage_value(&self, price: Money) -> Money {
        (price as f64 * self.constants.mortgage_ratio).round() as Money
    }

    pub fn unmortgage_cost(&self, price: Money) -> Money {
        let m = self.mortgage_value(price);
        m + (m as f64 * self.constants.unmortgage_surcharge).round() as Money
    }

    pub fn improvement_refund(&self, build_cost: Money) -> Money {
        (build_cost as f64 * self.constants.improvement_sell_ratio).round() as Money
    }
}

/// Color to ordered street names, derived from the slots themselves.
pub fn color_partition(schema: &BoardSchema) -> BTreeMap<String, Vec<String>> {
    let mut groups: BTreeMap<String, Vec<String>> = BTreeMap::new();
    for slot in &schema.slots {
        if let SlotKind::Street(street) = &slot.kind {
            let members = groups.entry(street.color.clone()).or_default();
            if !members.contains(&slot.name) {
                members.push(slot.name.clone());
            }
        }
    }
    groups
}

/// Every broken invariant; empty iff the schema is usable by the engine.
pub fn validate_schema(schema: &BoardSchema) -> Vec<Violation> {
    let mut out = Vec::new();
    let slots = &schema.slots;

    if slots.is_empty() {
        out.push(Violation::new("slots", "board has no slots"));
        return out;
    }
    if slots[0].kind != SlotKind::Go {
        out.push(Violation::new(&slots[0].name, "slot 0 must be go"));
    }
    let count_kind = |k: &SlotKind| slots.iter().filter(|s| &s.kind == k).count();
    if count_kind(&SlotKind::Go) != 1 {
        out.push(Violation::new("slots", "board needs exactly one go slot"));
    }
    if count_kind(&SlotKind::Jail) != 1 {
        out.push(Violation::new("slots", "board needs exactly one jail slot"));
    }

    check_slot_names(slots, &mut out);

    for slot in slots {
        let name = &slot.name;
        match &slot.kind {
            SlotKind::Street(street) => {
                if street.price <= 0 {
                    out.push(Violation::new(name, "purchase price must be positive"));
                }
                if !schema.color_groups.contains_key(&street.color) {
                    out.push(Violation::new(name, format!("orphan color '{}'", street.color)));
                }
                if street.rents.len() < 2 {
                    out.push(Violation::new(name, "rent table needs at least base and one improvement"));
                }
                if street.rents.first().is_some_and(|&r| r < 0) {
                    out.push(Violation::new(name, "rent must be nonnegative"));
                }
                if street.rents.windows(2).any(|w| w[1] <= w[0]) {
                    out.push(Violation::new(name, "rent table not strictly increasing"));
                }
                if street.build_costs.len() + 1 != street.rents.len() {
                    out.push(Violation::new(name, "build costs must have one entry per improvement level"));
                }
                if street.build_costs.iter().any(|&c| c <= 0) {
                    out.push(Violation::new(name, "build cost must be positive"));
                }
            }
            SlotKind::Railroad { price, rents } => {
                if *price <= 0 {
                    out.push(Violation::new(name, "purchase price must be positive"));
                }
                if rents.is_empty() || rents.iter().any(|&r| r < 0) {
                    out.push(Violation::new(name, "railroad rent table must be nonempty and nonnegative"));
                }
                if rents.windows(2).any(|w| w[1] < w[0]) {
                    out.push(Violation::new(name, "railroad rent decreases with railroads owned"));
                }
            }
            SlotKind::Utility { price, multipliers } => {
                if *price <= 0 {
                    out.push(Violation::new(name, "purchase price must be positive"));
                }
                if multipliers.is_empty() || multipliers.iter().any(|&r| r < 0) {
                    out.push(Violation::new(name, "utility multipliers must be nonempty and nonnegative"));
                }
                if multipliers.windows(2).any(|w| w[1] < w[0]) {
                    out.push(Violation::new(name, "utility multiplier decreases with utilities owned"));
                }
            }
            SlotKind::Tax { amount } => {
                if *amount < 0 {
                    out.push(Violation::new(name, "tax must be nonnegative"));
                }
            }
            _ => {}
        }
    }

    check_color_groups(schema, &mut out);
    check_dice(&schema.dice, &mut out);
    for deck in [Deck::Chance, Deck::CommunityChest] {
        check_cards(schema, deck, &mut out);
    }
    check_constants(schema, &mut out);
    if schema.go_increment < 0 {
        out.push(Violation::new("go_increment", "must be nonnegative"));
    }
    if out.is_empty() && !all_slots_reachable(schema) {
        out.push(Violation::new("board", "some slots are unreachable from go with these dice"));
    }
    out
}

/// Repeated names must repeat the whole definition; purchasable replicas
/// additionally form one contiguous run so they act as a single property.
fn check_slot_names(slots: &[Slot], out: &mut Vec<Violation>) {
    let mut first_seen: BTreeMap<&str, usize> = BTreeMap::new();
    for (i, slot) in slots.iter().enumerate() {
        if slot.name.trim().is_empty() {
            out.push(Violation::new(format!("slot {i}"), "empty slot name"));
            continue;
        }
        match first_seen.get(slot.name.as_str()) {
            None => {
                first_seen.insert(&slot.name, i);
            }
            Some(&j) if slots[j] != *slot => {
                out.push(Violation::new(&slot.name, "duplicate slot name with a different definition"));
            }
            Some(_) if slot.kind.is_purchasable() && slots[i - 1] != *slot => {
                out.push(Violation::new(&slot.name, "replicated property slots must be contiguous"));
            }
            Some(_) => {}
        }
    }
}

fn check_color_groups(schema: &BoardSchema, out: &mut Vec<Violation>) {
    let mut claimed: BTreeMap<&str, &str> = BTreeMap::new();
    for (color, members) in &schema.color_groups {
        if members.is_empty() {
            out.push(Violation::new(color, "empty color group"));
        }
        for name in members {
            match schema.street(name) {
                Some(street) if &street.color == color => {}
                Some(_) => out.push(Violation::new(name, format!("listed under '{color}' but carries another color"))),
                None => out.push(Violation::new(name, format!("color group '{color}' names a non-street"))),
            }
            if let Some(prev) = claimed.insert(name, color) {
                out.push(Violation::new(name, format!("in two color groups ('{prev}' and '{color}')")));
            }
        }
    }
    for slot in &schema.slots {
        if let SlotKind::Street(street) = &slot.kind {
            if let Some(members) = schema.color_groups.get(&street.color) {
                if !members.contains(&slot.name) {
                    out.push(Violation::new(&slot.name, "street missing from its color group"));
                }
            }
        }
    }
}

fn check_dice(dice: &DiceConfig, out: &mut Vec<Violation>) {
    if dice.count < 1 {
        out.push(Violation::new("dice", "count must be at least 1"));
    }
    if dice.faces < 1 {
        out.push(Violation::new("dice", "faces must be at least 1"));
    }
    for (die, weights) in &dice.die_weights {
        if *die >= dice.count {
            out.push(Violation::new("dice", format!("weights given for die {die} but only {} dice", dice.count)));
        }
        if weights.len() != dice.faces as usize {
            out.push(Violation::new("dice", format!("die {die} weights need {} entries", dice.faces)));
        }
        if weights.iter().any(|w| !w.is_finite() || *w < 0.0) {
            out.push(Violation::new("dice", "dice weights must be finite and nonnegative"));
        } else if (weights.iter().sum::<f64>() - 1.0).abs() > WEIGHT_TOLERANCE {
            out.push(Violation::new("dice", "dice weights not normalized"));
        }
    }
}

fn check_cards(schema: &BoardSchema, deck: Deck, out: &mut Vec<Violation>) {
    for (i, card) in schema.card_decks.deck(deck).iter().enumerate() {
        let subject = format!("{deck} card {i}");
        let is_jail_card = card.effect == CardEffect::GetOutOfJailFree;
        if card.retained != is_jail_card {
            out.push(Violation::new(&subject, "only get-out-of-jail-free cards may be retained"));
        }
        match &card.effect {
            CardEffect::AdvanceTo { slot } if schema.index_of(slot).is_none() => {
                out.push(Violation::new(&subject, format!("advances to unknown slot '{slot}'")));
            }
            CardEffect::AdvanceNearest { kind } => {
                let present = schema.slots.iter().any(|s| match kind {
                    NearestKind::Railroad => matches!(s.kind, SlotKind::Railroad { .. }),
                    NearestKind::Utility => matches!(s.kind, SlotKind::Utility { .. }),
                });
                if !present {
                    out.push(Violation::new(&subject, "no slot of the requested kind on the board"));
                }
            }
            CardEffect::Collect { amount }
            | CardEffect::Pay { amount }
            | CardEffect::PayEachPlayer { amount }
            | CardEffect::CollectFromEachPlayer { amount }
                if *amount < 0 =>
            {
                out.push(Violation::new(&subject, "card amount must be nonnegative"));
            }
            CardEffect::Repairs { per_house, per_hotel } if *per_house < 0 || *per_hotel < 0 => {
                out.push(Violation::new(&subject, "repair charges must be nonnegative"));
            }
            CardEffect::MoveBack { steps } if *steps == 0 => {
                out.push(Violation::new(&subject, "move-back needs at least one step"));
            }
            _ => {}
        }
    }
}

fn check_constants(schema: &BoardSchema, out: &mut Vec<Violation>) {
    let c = &schema.constants;
    let unit = |x: f64| x.is_finite() && (0.0..=1.0).contains(&x);
    if c.jail_fine < 0 {
        out.push(Violation::new("constants.jail_fine", "must be nonnegative"));
    }
    if !unit(c.mortgage_ratio) {
        out.push(Violation::new("constants.mortgage_ratio", "must lie in [0, 1]"));
    }
    if !(c.unmortgage_surcharge.is_finite() && c.unmortgage_surcharge >= 0.0) {
        out.push(Violation::new("constants.unmortgage_surcharge", "must be nonnegative"));
    }
    if !unit(c.improvement_sell_ratio) {
        out.push(Violation::new("constants.improvement_sell_ratio", "must lie in [0, 1]"));
    }
    if c.starting_cash < 0 {
        out.push(Violation::new("constants.starting_cash", "must be nonnegative"));
    }
    if c.hotel_level == 0 {
        out.push(Violation::new("constants.hotel_level", "must be at least 1"));
    }
}

/// Breadth-first search over positions using every achievable dice sum.
fn all_slots_reachable(schema: &BoardSchema) -> bool {
    let n = schema.slots.len();
    let steps: Vec<usize> = schema
        .dice
        .sum_distribution()
        .into_iter()
        .filter(|&(_, p)| p > 0.0)
        .map(|(s, _)| s as usize % n)
        .collect();
    let mut seen = vec![false; n];
    let mut queue = VecDeque::from([0usize]);
    seen[0] = true;
    while let Some(pos) = queue.pop_front() {
        for &s in &steps {
            let next = (pos + s) % n;
            if !seen[next] {
                seen[next] = true;
                queue.push_back(next);
            }
        }
    }
    seen.into_iter().all(|x| x)
}

/// Pretty JSON with recursively sorted object keys and a trailing newline.
pub fn canonical_json(value: &serde_json::Value) -> String {
    let mut s = serde_json::to_string_pretty(&sort_keys(value)).expect("json value serializes");
    s.push('\n');
    s
}

fn sort_keys(value: &serde_json::Value) -> serde_json::Value {
    use serde_json::Value;
    match value {
        Value::Object(map) => {
            let mut entries: Vec<_> = map.iter().collect();
            entries.sort_by(|a, b| a.0.cmp(b.0));
            Value::Object(entries.into_iter().map(|(k, v)| (k.clone(), sort_keys(v))).collect())
        }
        Value::Array(items) => Value::Array(items.iter().map(sort_keys).collect()),
        other => other.clone(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_board_is_valid() {
        let schema = BoardSchema::us_default();
        assert_eq!(validate_schema(&schema), vec![]);
    }

    #[test]
    fn default_document_is_canonical() {
        let schema = BoardSchema::us_default();
        assert_eq!(schema.to_canonical_json(), BoardSchema::default_document());
    }

    #[test]
    fn orphan_color_is_reported() {
        let mut schema = BoardSchema::us_default();
        if let SlotKind::Street(s) = &mut schema.slots[1].kind {
            s.color = "mauve".into();
        }
        let doc = schema.to_canonical_json();
        match load_schema(&doc) {
            Err(SchemaError::Invalid(v)) => {
                assert!(v.iter().any(|v| v.rule.contains("orphan color")), "{v:?}");
            }
            other => panic!("expected validation error, got {other:?}"),
        }
    }

    #[test]
    fn unnormalized_weights() {
        let mut schema = BoardSchema::us_default();
        schema.dice.die_weights.insert(0, vec![0.15; 6]);
        let v = validate_schema(&schema);
        assert_eq!(v.len(), 1);
        assert_eq!(v[0].rule, "dice weights not normalized");
    }

    #[test]
    fn hotel_below_four_houses() {
        let mut schema = BoardSchema::us_default();
        let idx = schema.index_of("Boardwalk").unwrap();
        if let SlotKind::Street(s) = &mut schema.slots[idx].kind {
            s.rents[5] = 1000;
        }
        let v = validate_schema(&schema);
        assert_eq!(v, vec![Violation::new("Boardwalk", "rent table not strictly increasing")]);
    }

    #[test]
    fn decreasing_railroad_rent() {
        let mut schema = BoardSchema::us_default();
        let idx = schema.index_of("Reading Railroad").unwrap();
        if let SlotKind::Railroad { rents, .. } = &mut schema.slots[idx].kind {
            rents[3] = 10;
        }
        assert!(validate_schema(&schema)
            .iter()
            .any(|v| v.subject == "Reading Railroad" && v.rule.contains("decreases")));
    }

    #[test]
    fn retained_flag_only_on_jail_card() {
        let mut schema = BoardSchema::us_default();
        schema.card_decks.chance[0].retained = true;
        assert!(validate_schema(&schema)
            .iter()
            .any(|v| v.rule.contains("only get-out-of-jail-free")));
    }

    #[test]
    fn format_error_has_location() {
        match load_schema("{\n  \"name\": 3\n}") {
            Err(SchemaError::Format { line, .. }) => assert_eq!(line, 2),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn unreachable_slots_with_single_faced_die() {
        let mut schema = BoardSchema::us_default();
        schema.dice = DiceConfig {
            count: 2,
            faces: 1,
            die_weights: BTreeMap::new(),
        };
        // Only even steps on a 40-slot ring.
        assert!(validate_schema(&schema).iter().any(|v| v.rule.contains("unreachable")));
    }

    #[test]
    fn partition_of_default_board() {
        let schema = BoardSchema::us_default();
        let groups = color_partition(&schema);
        assert_eq!(groups.len(), 8);
        assert_eq!(groups["blue"], vec!["Park Place", "Boardwalk"]);
        assert_eq!(groups, schema.color_groups);
    }

    #[test]
    fn mortgage_arithmetic() {
        let schema = BoardSchema::us_default();
        assert_eq!(schema.mortgage_value(60), 30);
        assert_eq!(schema.unmortgage_cost(60), 33);
        assert_eq!(schema.improvement_refund(50), 25);
    }
}
