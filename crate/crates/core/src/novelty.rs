//! Novelty specifications and the transforms that inject them into a board
//! before a game starts. Transforms touch only `(BoardSchema, GameLimits)`.

use std::collections::BTreeSet;
use std::fmt;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::board::{
    canonical_json, color_partition, validate_schema, BoardSchema, CardEffect, Deck, Money, SlotKind, Violation,
    WEIGHT_TOLERANCE,
};
use crate::engine::GameLimits;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Category {
    /// An existing feature takes a new value.
    Attribute,
    /// A new kind of object or entity appears.
    Class,
    /// The way entities or positions are laid out changes.
    Representation,
}

impl fmt::Display for Category {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Category::Attribute => "attribute",
            Category::Class => "class",
            Category::Representation => "representation",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Difficulty {
    Easy,
    Medium,
    Hard,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Family {
    DiceCount,
    DiceBias,
    ColorCollapse,
    Recolor,
    SwapExtend,
    PriceScale,
    RentScale,
    TaxChange,
    GoIncrementChange,
    CardAmountChange,
    NewImprovementTier,
    BoardScramble,
}

impl Family {
    pub fn category(self) -> Category {
        match self {
            Family::DiceCount | Family::DiceBias | Family::NewImprovementTier => Category::Class,
            Family::SwapExtend | Family::BoardScramble => Category::Representation,
            Family::ColorCollapse
            | Family::Recolor
            | Family::PriceScale
            | Family::RentScale
            | Family::TaxChange
            | Family::GoIncrementChange
            | Family::CardAmountChange => Category::Attribute,
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let v = serde_json::to_value(self).expect("family serializes");
        f.write_str(v.as_str().unwrap_or_default())
    }
}

/// Largest number of dice a dice-count novelty may ask for.
pub const MAX_DICE: u32 = 8;
/// Largest replication width for swap-extend.
pub const MAX_WIDTH: u32 = 10;
/// Scale factors must lie in this closed range.
pub const FACTOR_RANGE: (f64, f64) = (0.1, 10.0);

/// Family-specific parameters. The tag names the family.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "kebab-case", deny_unknown_fields)]
pub enum NoveltyParams {
    DiceCount {
        count: u32,
    },
    /// Replaces the face weights of one die.
    DiceBias {
        die: u32,
        weights: Vec<f64>,
    },
    /// Every street outside `keep` takes color `to`.
    ColorCollapse {
        keep: String,
        to: String,
    },
    Recolor {
        property: String,
        color: String,
    },
    /// Each target slot is replaced by `width` consecutive copies of itself.
    SwapExtend {
        targets: Vec<String>,
        width: u32,
    },
    /// Scales purchase prices of the streets of `color`, or of every
    /// purchasable slot when no color is given.
    PriceScale {
        factor: f64,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        color: Option<String>,
    },
    /// Scales street and railroad rents, optionally for one color only.
    RentScale {
        factor: f64,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        color: Option<String>,
    },
    TaxChange {
        slot: String,
        amount: Money,
    },
    GoIncrementChange {
        amount: Money,
    },
    /// Scales every monetary card amount, optionally in one deck only.
    CardAmountChange {
        factor: f64,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        deck: Option<Deck>,
    },
    /// Appends one improvement level above the hotel on every street.
    NewImprovementTier {
        rent_factor: f64,
        cost_factor: f64,
    },
    /// Permutes every slot except Go, keeping replicated runs together.
    BoardScramble {
        seed: u64,
    },
}

impl NoveltyParams {
    pub fn family(&self) -> Family {
        match self {
            NoveltyParams::DiceCount { .. } => Family::DiceCount,
            NoveltyParams::DiceBias { .. } => Family::DiceBias,
            NoveltyParams::ColorCollapse { .. } => Family::ColorCollapse,
            NoveltyParams::Recolor { .. } => Family::Recolor,
            NoveltyParams::SwapExtend { .. } => Family::SwapExtend,
            NoveltyParams::PriceScale { .. } => Family::PriceScale,
            NoveltyParams::RentScale { .. } => Family::RentScale,
            NoveltyParams::TaxChange { .. } => Family::TaxChange,
            NoveltyParams::GoIncrementChange { .. } => Family::GoIncrementChange,
            NoveltyParams::CardAmountChange { .. } => Family::CardAmountChange,
            NoveltyParams::NewImprovementTier { .. } => Family::NewImprovementTier,
            NoveltyParams::BoardScramble { .. } => Family::BoardScramble,
        }
    }

    fn factor_mut(&mut self) -> Option<&mut f64> {
        match self {
            NoveltyParams::PriceScale { factor, .. }
            | NoveltyParams::RentScale { factor, .. }
            | NoveltyParams::CardAmountChange { factor, .. } => Some(factor),
            _ => None,
        }
    }

    /// Board-independent validity domain of the family.
    pub fn violations(&self) -> Vec<Violation> {
        let mut out = Vec::new();
        let mut bad = |rule: String| out.push(violation(self.family().to_string(), rule));
        let factor_ok = |f: f64| f.is_finite() && (FACTOR_RANGE.0..=FACTOR_RANGE.1).contains(&f);
        match self {
            NoveltyParams::DiceCount { count } => {
                if !(1..=MAX_DICE).contains(count) {
                    bad(format!("dice count must lie in 1..={MAX_DICE}"));
                }
            }
            NoveltyParams::DiceBias { weights, .. } => {
                if let Err(e) = check_weights(weights) {
                    bad(e.to_string());
                }
            }
            NoveltyParams::ColorCollapse { keep, to } => {
                if keep == to {
                    bad("kept color and target color must differ".into());
                }
                if to.trim().is_empty() {
                    bad("target color is empty".into());
                }
            }
            NoveltyParams::Recolor { property, color } => {
                if property.trim().is_empty() || color.trim().is_empty() {
                    bad("property and color must be named".into());
                }
            }
            NoveltyParams::SwapExtend { targets, width } => {
                if targets.is_empty() {
                    bad("needs at least one target slot".into());
                }
                if targets.iter().collect::<BTreeSet<_>>().len() != targets.len() {
                    bad("target slots repeat".into());
                }
                if !(1..=MAX_WIDTH).contains(width) {
                    bad(format!("width must lie in 1..={MAX_WIDTH}"));
                }
            }
            NoveltyParams::PriceScale { factor, .. }
            | NoveltyParams::RentScale { factor, .. }
            | NoveltyParams::CardAmountChange { factor, .. } => {
                if !factor_ok(*factor) {
                    bad(format!("factor must lie in [{}, {}]", FACTOR_RANGE.0, FACTOR_RANGE.1));
                }
            }
            NoveltyParams::TaxChange { amount, .. } | NoveltyParams::GoIncrementChange { amount } => {
                if *amount < 0 {
                    bad("amount must be nonnegative".into());
                }
            }
            NoveltyParams::NewImprovementTier { rent_factor, cost_factor } => {
                if !factor_ok(*rent_factor) || *rent_factor <= 1.0 {
                    bad("rent factor must exceed 1 so rents keep increasing".into());
                }
                if !factor_ok(*cost_factor) {
                    bad(format!("cost factor must lie in [{}, {}]", FACTOR_RANGE.0, FACTOR_RANGE.1));
                }
            }
            NoveltyParams::BoardScramble { .. } => {}
        }
        out
    }
}

/// Per-game distribution over parameters. The same sampler serves every
/// post-onset game of a tournament.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "distribution", rename_all = "kebab-case", deny_unknown_fields)]
pub enum Sampler {
    /// Uniform over the listed parameter sets.
    Choice { options: Vec<NoveltyParams> },
    /// Scale factor drawn uniformly from `[low, high]`, rounded to three
    /// decimals, replacing the fixed factor.
    FactorRange { low: f64, high: f64 },
}

#[derive(Debug, Error)]
pub enum WeightsError {
    #[error("weights are empty")]
    Empty,
    #[error("weight {0} is negative or not finite")]
    Negative(f64),
    #[error("weights sum to {0}, not 1")]
    NotNormalized(f64),
}

fn check_weights(weights: &[f64]) -> Result<(), WeightsError> {
    if weights.is_empty() {
        return Err(WeightsError::Empty);
    }
    if let Some(&w) = weights.iter().find(|w| !w.is_finite() || **w < 0.0) {
        return Err(WeightsError::Negative(w));
    }
    let sum: f64 = weights.iter().sum();
    if (sum - 1.0).abs() > WEIGHT_TOLERANCE {
        return Err(WeightsError::NotNormalized(sum));
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct SpecBody {
    name: String,
    category: Category,
    difficulty: Difficulty,
    #[serde(default, skip_serializing_if = "String::is_empty")]
    description: String,
    parameters: NoveltyParams,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    sampler: Option<Sampler>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct SpecDocument {
    #[serde(default)]
    id: Option<String>,
    #[serde(flatten)]
    body: SpecBody,
}

/// A novelty: a family with fixed parameters and an optional per-game
/// sampler. The id is a hash of everything else, so reports can name a
/// novelty without revealing it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "serde_json::Value", into = "serde_json::Value")]
pub struct NoveltySpec {
    id: String,
    body: SpecBody,
}

impl NoveltySpec {
    pub fn new(
        name: impl Into<String>,
        difficulty: Difficulty,
        parameters: NoveltyParams,
        sampler: Option<Sampler>,
    ) -> Self {
        let body = SpecBody {
            name: name.into(),
            category: parameters.family().category(),
            difficulty,
            description: String::new(),
            parameters,
            sampler,
        };
        Self::from_body(body)
    }

    pub fn with_description(mut self, text: impl Into<String>) -> Self {
        self.body.description = text.into();
        Self::from_body(self.body)
    }

    fn from_body(body: SpecBody) -> Self {
        let doc = canonical_json(&serde_json::to_value(&body).expect("spec serializes"));
        let id = format!("nv-{}", &hex::encode(Sha256::digest(doc.as_bytes()))[..16]);
        NoveltySpec { id, body }
    }

    pub fn id(&self) -> &str {
        &self.id
    }

    pub fn name(&self) -> &str {
        &self.body.name
    }

    pub fn category(&self) -> Category {
        self.body.category
    }

    pub fn family(&self) -> Family {
        self.body.parameters.family()
    }

    pub fn difficulty(&self) -> Difficulty {
        self.body.difficulty
    }

    pub fn description(&self) -> &str {
        &self.body.description
    }

    pub fn parameters(&self) -> &NoveltyParams {
        &self.body.parameters
    }

    pub fn sampler(&self) -> Option<&Sampler> {
        self.body.sampler.as_ref()
    }

    pub fn to_canonical_json(&self) -> String {
        canonical_json(&serde_json::Value::from(self.clone()))
    }

    /// Every problem with the spec that can be seen without a board.
    pub fn violations(&self) -> Vec<Violation> {
        let mut out = Vec::new();
        let name = self.name();
        if name.trim().is_empty() {
            out.push(violation("name", "spec needs a name"));
        }
        let family = self.family();
        if self.category() != family.category() {
            out.push(violation(
                name,
                format!("{family} is a {} novelty, not {}", family.category(), self.category()),
            ));
        }
        out.extend(self.parameters().violations());
        match self.sampler() {
            None => {}
            Some(Sampler::Choice { options }) => {
                if options.is_empty() {
                    out.push(violation(name, "choice sampler has no options"));
                }
                for option in options {
                    if option.family() != family {
                        out.push(violation(name, format!("sampler option of family {}", option.family())));
                    }
                    out.extend(option.violations());
                }
            }
            Some(Sampler::FactorRange { low, high }) => {
                if self.parameters().clone().factor_mut().is_none() {
                    out.push(violation(name, format!("{family} has no factor to sample")));
                }
                let (min, max) = FACTOR_RANGE;
                if !(low.is_finite() && high.is_finite() && min <= *low && low <= high && *high <= max) {
                    out.push(violation(name, format!("factor range must satisfy {min} <= low <= high <= {max}")));
                }
            }
        }
        out
    }
}

impl TryFrom<serde_json::Value> for NoveltySpec {
    type Error = String;

    fn try_from(value: serde_json::Value) -> Result<Self, String> {
        let doc: SpecDocument = serde_json::from_value(value).map_err(|e| e.to_string())?;
        let spec = NoveltySpec::from_body(doc.body);
        match doc.id {
            Some(id) if id != spec.id => Err(format!("declared id {id} does not match content hash {}", spec.id)),
            _ => Ok(spec),
        }
    }
}

impl From<NoveltySpec> for serde_json::Value {
    fn from(spec: NoveltySpec) -> Self {
        let mut value = serde_json::to_value(&spec.body).expect("spec serializes");
        value
            .as_object_mut()
            .expect("spec body is an object")
            .insert("id".into(), spec.id.into());
        value
    }
}

/// Concrete parameters for one game.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NoveltyInstance {
    pub spec_id: String,
    pub parameters: NoveltyParams,
    /// 1-based game index within a tournament, 0 outside one.
    pub game_index: u32,
}

impl NoveltyInstance {
    /// Stable short id of the spec and parameters (not the game index).
    pub fn id(&self) -> String {
        let doc = canonical_json(&serde_json::to_value(&self.parameters).expect("parameters serialize"));
        let digest = Sha256::digest(format!("{}\n{doc}", self.spec_id).as_bytes());
        format!("{}/{}", self.spec_id, &hex::encode(digest)[..8])
    }
}

/// Draws parameters for game `game_index`. Samplerless specs return their
/// fixed parameters without touching `rng`.
pub fn sample_instance<R: Rng + ?Sized>(spec: &NoveltySpec, rng: &mut R, game_index: u32) -> NoveltyInstance {
    let parameters = match spec.sampler() {
        None => spec.parameters().clone(),
        Some(Sampler::Choice { options }) => match options.len() {
            0 => spec.parameters().clone(),
            n => options[rng.random_range(0..n)].clone(),
        },
        Some(Sampler::FactorRange { low, high }) => {
            let mut params = spec.parameters().clone();
            let draw = if high > low { rng.random_range(*low..=*high) } else { *low };
            if let Some(f) = params.factor_mut() {
                *f = ((draw * 1000.0).round() / 1000.0).clamp(*low, *high);
            }
            params
        }
    };
    NoveltyInstance {
        spec_id: spec.id().to_string(),
        parameters,
        game_index,
    }
}

#[derive(Debug, Error)]
pub enum NoveltyError {
    #[error("novelty document error: {0}")]
    Format(String),
    #[error("invalid novelty spec: {}", join(.0))]
    Invalid(Vec<Violation>),
    #[error("invalid dice weights: {0}")]
    Weights(#[from] WeightsError),
}

#[derive(Debug, Error)]
pub enum InjectionError {
    #[error("novelty parameters out of range: {}", join(.0))]
    Parameters(Vec<Violation>),
    #[error("novelty would produce an invalid board: {}", join(.0))]
    Board(Vec<Violation>),
}

impl InjectionError {
    pub fn violations(&self) -> &[Violation] {
        match self {
            InjectionError::Parameters(v) | InjectionError::Board(v) => v,
        }
    }
}

fn join(v: &[Violation]) -> String {
    v.iter().map(|v| v.to_string()).collect::<Vec<_>>().join("; ")
}

fn violation(subject: impl Into<String>, rule: impl Into<String>) -> Violation {
    Violation {
        subject: subject.into(),
        rule: rule.into(),
    }
}

/// A spec that biases die 0 toward the given face weights.
pub fn dice_bias_novelty(weights: Vec<f64>) -> Result<NoveltySpec, NoveltyError> {
    check_weights(&weights)?;
    let name = format!(
        "dice-bias-{}",
        weights.iter().map(|w| format!("{w:.3}")).collect::<Vec<_>>().join("-")
    );
    Ok(NoveltySpec::new(
        name,
        Difficulty::Hard,
        NoveltyParams::DiceBias { die: 0, weights },
        None,
    ))
}

fn scale(amount: Money, factor: f64) -> Money {
    (amount as f64 * factor).round() as Money
}

/// Applies one instance. Inputs are never modified; the result passes
/// `validate_schema` and fits `limits.max_board_size` or an error names
/// what broke.
pub fn apply_novelty(
    schema: &BoardSchema,
    limits: &GameLimits,
    instance: &NoveltyInstance,
) -> Result<(BoardSchema, GameLimits), InjectionError> {
    let params = &instance.parameters;
    let problems = params.violations();
    if !problems.is_empty() {
        return Err(InjectionError::Parameters(problems));
    }
    let mut out = schema.clone();
    let mut missing = Vec::new();
    let mut require = |found: bool, subject: &str, rule: &str| {
        if !found {
            missing.push(violation(subject, rule));
        }
    };
    match params {
        NoveltyParams::DiceCount { count } => {
            out.dice.count = *count;
            out.dice.die_weights.retain(|die, _| die < count);
        }
        NoveltyParams::DiceBias { die, weights } => {
            let faces = out.dice.faces as usize;
            let uniform = weights.len() == faces && weights.iter().all(|w| (w * faces as f64 - 1.0).abs() < 1e-12);
            if uniform {
                out.dice.die_weights.remove(die);
            } else {
                out.dice.die_weights.insert(*die, weights.clone());
            }
        }
        NoveltyParams::ColorCollapse { keep, to } => {
            require(out.color_groups.contains_key(keep), keep, "no such color group");
            for slot in &mut out.slots {
                if let SlotKind::Street(street) = &mut slot.kind {
                    if &street.color != keep {
                        street.color = to.clone();
                    }
                }
            }
        }
        NoveltyParams::Recolor { property, color } => {
            let mut found = false;
            for slot in out.slots.iter_mut().filter(|s| &s.name == property) {
                if let SlotKind::Street(street) = &mut slot.kind {
                    street.color = color.clone();
                    found = true;
                }
            }
            require(found, property, "no such street");
        }
        NoveltyParams::SwapExtend { targets, width } => {
            for target in targets {
                require(out.index_of(target).is_some(), target, "no such slot");
                if target != &out.slots[0].name {
                    let slots = std::mem::take(&mut out.slots);
                    for slot in slots {
                        let copies = if &slot.name == target { *width as usize } else { 1 };
                        out.slots.extend(std::iter::repeat_n(slot, copies));
                    }
                } else {
                    require(false, target, "go cannot be extended");
                }
            }
        }
        NoveltyParams::PriceScale { factor, color } => {
            if let Some(c) = color {
                require(out.color_groups.contains_key(c), c, "no such color group");
            }
            for slot in &mut out.slots {
                match &mut slot.kind {
                    SlotKind::Street(street) if color.as_ref().is_none_or(|c| c == &street.color) => {
                        street.price = scale(street.price, *factor).max(1);
                    }
                    SlotKind::Railroad { price, .. } | SlotKind::Utility { price, .. } if color.is_none() => {
                        *price = scale(*price, *factor).max(1);
                    }
                    _ => {}
                }
            }
        }
        NoveltyParams::RentScale { factor, color } => {
            if let Some(c) = color {
                require(out.color_groups.contains_key(c), c, "no such color group");
            }
            for slot in &mut out.slots {
                match &mut slot.kind {
                    SlotKind::Street(street) if color.as_ref().is_none_or(|c| c == &street.color) => {
                        street.rents.iter_mut().for_each(|r| *r = scale(*r, *factor));
                    }
                    SlotKind::Railroad { rents, .. } if color.is_none() => {
                        rents.iter_mut().for_each(|r| *r = scale(*r, *factor));
                    }
                    _ => {}
                }
            }
        }
        NoveltyParams::TaxChange { slot, amount } => {
            let mut found = false;
            for s in out.slots.iter_mut().filter(|s| &s.name == slot) {
                if let SlotKind::Tax { amount: a } = &mut s.kind {
                    *a = *amount;
                    found = true;
                }
            }
            require(found, slot, "no such tax slot");
        }
        NoveltyParams::GoIncrementChange { amount } => out.go_increment = *amount,
        NoveltyParams::CardAmountChange { factor, deck } => {
            for d in [Deck::Chance, Deck::CommunityChest] {
                if deck.is_some_and(|only| only != d) {
                    continue;
                }
                for card in out.card_decks.deck_mut(d) {
                    match &mut card.effect {
                        CardEffect::Collect { amount }
                        | CardEffect::Pay { amount }
                        | CardEffect::PayEachPlayer { amount }
                        | CardEffect::CollectFromEachPlayer { amount } => *amount = scale(*amount, *factor),
                        CardEffect::Repairs { per_house, per_hotel } => {
                            *per_house = scale(*per_house, *factor);
                            *per_hotel = scale(*per_hotel, *factor);
                        }
                        _ => {}
                    }
                }
            }
        }
        NoveltyParams::NewImprovementTier { rent_factor, cost_factor } => {
            for slot in &mut out.slots {
                if let SlotKind::Street(street) = &mut slot.kind {
                    if let (Some(&rent), Some(&cost)) = (street.rents.last(), street.build_costs.last()) {
                        street.rents.push(scale(rent, *rent_factor).max(rent + 1));
                        street.build_costs.push(scale(cost, *cost_factor).max(1));
                    }
                }
            }
        }
        NoveltyParams::BoardScramble { seed } => {
            let mut runs: Vec<Vec<_>> = Vec::new();
            for slot in out.slots.drain(1..) {
                match runs.last_mut() {
                    Some(run) if run[0] == slot => run.push(slot),
                    _ => runs.push(vec![slot]),
                }
            }
            runs.shuffle(&mut ChaCha8Rng::seed_from_u64(*seed));
            out.slots.extend(runs.into_iter().flatten());
        }
    }
    if !missing.is_empty() {
        return Err(InjectionError::Board(missing));
    }
    out.color_groups = color_partition(&out);
    let mut problems = validate_schema(&out);
    if out.slots.len() > limits.max_board_size {
        problems.push(violation(
            "board",
            format!("{} slots exceed the maximum board size {}", out.slots.len(), limits.max_board_size),
        ));
    }
    if !problems.is_empty() {
        return Err(InjectionError::Board(problems));
    }
    Ok((out, limits.clone()))
}

/// Parses a spec document: one spec object or a list of them. Every spec is
/// checked for board-independent validity.
pub fn load_specs(source: &str) -> Result<Vec<NoveltySpec>, NoveltyError> {
    let value: serde_json::Value = serde_json::from_str(source).map_err(|e| NoveltyError::Format(e.to_string()))?;
    let specs = match &value {
        serde_json::Value::Array(_) => serde_json::from_value::<Vec<NoveltySpec>>(value),
        _ => serde_json::from_value::<NoveltySpec>(value).map(|s| vec![s]),
    }
    .map_err(|e| NoveltyError::Format(e.to_string()))?;
    let problems: Vec<Violation> = specs.iter().flat_map(NoveltySpec::violations).collect();
    if problems.is_empty() {
        Ok(specs)
    } else {
        Err(NoveltyError::Invalid(problems))
    }
}

/// Serializes specs as a canonical list document.
pub fn write_specs(specs: &[NoveltySpec]) -> String {
    let values: Vec<serde_json::Value> = specs.iter().cloned().map(Into::into).collect();
    canonical_json(&serde_json::Value::Array(values))
}

/// Looks a spec up by id or by name.
pub fn find_spec<'a>(specs: &'a [NoveltySpec], key: &str) -> Option<&'a NoveltySpec> {
    specs.iter().find(|s| s.id() == key || s.name() == key)
}

/// The shipped example library.
pub fn enumerate_library() -> Vec<NoveltySpec> {
    use Difficulty::{Easy, Hard, Medium};
    use NoveltyParams as P;
    let spec = |name: &str, difficulty, params, sampler| NoveltySpec::new(name, difficulty, params, sampler);
    let fixed = |name: &str, difficulty, params| NoveltySpec::new(name, difficulty, params, None);
    let taxes = || vec!["Income Tax".to_string(), "Luxury Tax".to_string()];
    let mut out = Vec::new();

    for count in [1, 3, 4, 5] {
        out.push(fixed(&format!("dice-count-{count}"), Easy, P::DiceCount { count }));
    }
    out.push(spec(
        "dice-count-3-to-5",
        Medium,
        P::DiceCount { count: 3 },
        Some(Sampler::Choice {
            options: (3..=5).map(|count| P::DiceCount { count }).collect(),
        }),
    ));

    let heavy_six = vec![0.1, 0.1, 0.1, 0.1, 0.1, 0.5];
    let heavy_one = vec![0.5, 0.1, 0.1, 0.1, 0.1, 0.1];
    let no_six = vec![0.2, 0.2, 0.2, 0.2, 0.2, 0.0];
    out.push(fixed("dice-bias-heavy-six", Hard, P::DiceBias { die: 0, weights: heavy_six.clone() }));
    out.push(fixed("dice-bias-heavy-one", Hard, P::DiceBias { die: 0, weights: heavy_one.clone() }));
    out.push(fixed("dice-bias-no-six", Hard, P::DiceBias { die: 1, weights: no_six }));
    out.push(spec(
        "dice-bias-either-end",
        Hard,
        P::DiceBias { die: 0, weights: heavy_six.clone() },
        Some(Sampler::Choice {
            options: vec![P::DiceBias { die: 0, weights: heavy_six }, P::DiceBias { die: 0, weights: heavy_one }],
        }),
    ));

    for (keep, to) in [("blue", "green"), ("brown", "green"), ("orange", "red"), ("green", "yellow")] {
        out.push(fixed(
            &format!("color-collapse-keep-{keep}"),
            Hard,
            P::ColorCollapse {
                keep: keep.into(),
                to: to.into(),
            },
        ));
    }

    for (property, color, difficulty) in [
        ("Boardwalk", "lime-green", Hard),
        ("Park Place", "lime-green", Hard),
        ("Mediterranean Avenue", "purple", Medium),
        ("Illinois Avenue", "teal", Medium),
        ("St. Charles Place", "orange", Medium),
    ] {
        out.push(fixed(
            &format!("recolor-{}", property.to_lowercase().replace(['.', ' '], "-").replace("--", "-")),
            difficulty,
            P::Recolor {
                property: property.into(),
                color: color.into(),
            },
        ));
    }

    let extend = |targets: Vec<String>, width| P::SwapExtend { targets, width };
    out.push(fixed("swap-extend-income-tax-5", Medium, extend(vec!["Income Tax".into()], 5)));
    out.push(fixed("swap-extend-luxury-tax-5", Medium, extend(vec!["Luxury Tax".into()], 5)));
    out.push(fixed("swap-extend-both-taxes-5", Medium, extend(taxes(), 5)));
    out.push(fixed("swap-extend-boardwalk-3", Hard, extend(vec!["Boardwalk".into()], 3)));
    out.push(fixed("swap-extend-reading-railroad-3", Medium, extend(vec!["Reading Railroad".into()], 3)));
    out.push(spec(
        "swap-extend-both-taxes-2-to-5",
        Medium,
        extend(taxes(), 2),
        Some(Sampler::Choice {
            options: (2..=5).map(|w| extend(taxes(), w)).collect(),
        }),
    ));

    for factor in [0.5, 1.5, 2.0] {
        out.push(fixed(&format!("price-scale-{factor}"), Easy, P::PriceScale { factor, color: None }));
    }
    out.push(fixed(
        "price-scale-orange-2",
        Medium,
        P::PriceScale {
            factor: 2.0,
            color: Some("orange".into()),
        },
    ));
    out.push(spec(
        "price-scale-0.5-to-2",
        Medium,
        P::PriceScale { factor: 1.0, color: None },
        Some(Sampler::FactorRange { low: 0.5, high: 2.0 }),
    ));

    for factor in [0.5, 2.0] {
        out.push(fixed(&format!("rent-scale-{factor}"), Medium, P::RentScale { factor, color: None }));
    }
    out.push(fixed(
        "rent-scale-blue-3",
        Medium,
        P::RentScale {
            factor: 3.0,
            color: Some("blue".into()),
        },
    ));
    out.push(spec(
        "rent-scale-0.5-to-3",
        Medium,
        P::RentScale { factor: 1.0, color: None },
        Some(Sampler::FactorRange { low: 0.5, high: 3.0 }),
    ));

    for (slot, amount) in [("Income Tax", 0), ("Income Tax", 400), ("Luxury Tax", 300)] {
        let name = format!("tax-change-{}-{amount}", slot.to_lowercase().replace(' ', "-"));
        out.push(fixed(
            &name,
            Easy,
            P::TaxChange {
                slot: slot.into(),
                amount,
            },
        ));
    }

    for amount in [0, 100, 400] {
        out.push(fixed(&format!("go-increment-{amount}"), Easy, P::GoIncrementChange { amount }));
    }
    out.push(spec(
        "go-increment-100-to-300",
        Medium,
        P::GoIncrementChange { amount: 200 },
        Some(Sampler::Choice {
            options: [100, 200, 300].map(|amount| P::GoIncrementChange { amount }).to_vec(),
        }),
    ));

    out.push(fixed("card-amount-0.1", Easy, P::CardAmountChange { factor: 0.1, deck: None }));
    out.push(fixed("card-amount-3", Easy, P::CardAmountChange { factor: 3.0, deck: None }));
    out.push(fixed(
        "card-amount-chance-2",
        Easy,
        P::CardAmountChange {
            factor: 2.0,
            deck: Some(Deck::Chance),
        },
    ));

    for (name, rent_factor, cost_factor) in [
        ("new-tier-skyscraper", 1.5, 1.0),
        ("new-tier-resort", 2.0, 1.5),
        ("new-tier-costly", 1.25, 2.0),
    ] {
        out.push(fixed(name, Hard, P::NewImprovementTier { rent_factor, cost_factor }));
    }

    for seed in 1..=3 {
        out.push(fixed(&format!("board-scramble-{seed}"), Hard, P::BoardScramble { seed }));
    }

    out
}

/// The demo subset: dice count, color collapse and swap-extend.
pub fn demo_novelties() -> Vec<NoveltySpec> {
    let demo = [
        "dice-count-3",
        "dice-count-4",
        "dice-count-5",
        "color-collapse-keep-blue",
        "swap-extend-both-taxes-5",
        "swap-extend-income-tax-5",
        "swap-extend-luxury-tax-5",
    ];
    enumerate_library().into_iter().filter(|s| demo.contains(&s.name())).collect()
}
