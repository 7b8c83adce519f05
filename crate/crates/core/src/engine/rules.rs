//! Pure rule functions over a board and a game state.

use std::collections::{BTreeMap, HashMap};
use std::sync::Arc;

use rand::Rng;

use super::events::PlayerId;
use super::state::GameState;
use crate::agents::{ActionKind, TradeOffer};
use crate::board::{color_partition, BoardSchema, DiceConfig, Money, SlotKind, Street};

/// Multiplier used for rent owed after an advance-to-nearest card.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RentModifier {
    Normal,
    /// Railroads: double rent.
    NearestRailroad,
    /// Utilities: ten times the dice sum regardless of holdings.
    NearestUtility,
}

/// A board with lookup tables built once per game.
#[derive(Debug, Clone)]
pub struct Board {
    pub schema: Arc<BoardSchema>,
    first_index: HashMap<String, usize>,
    groups: BTreeMap<String, Vec<String>>,
    railroads: Vec<String>,
    utilities: Vec<String>,
    properties: Vec<String>,
}

impl Board {
    pub fn new(schema: Arc<BoardSchema>) -> Self {
        let mut first_index = HashMap::new();
        let mut railroads = Vec::new();
        let mut utilities = Vec::new();
        for (i, slot) in schema.slots.iter().enumerate() {
            if first_index.contains_key(&slot.name) {
                continue;
            }
            first_index.insert(slot.name.clone(), i);
            match slot.kind {
                SlotKind::Railroad { .. } => railroads.push(slot.name.clone()),
                SlotKind::Utility { .. } => utilities.push(slot.name.clone()),
                _ => {}
            }
        }
        let groups = color_partition(&schema);
        let properties = schema.properties().into_iter().map(|s| s.name.clone()).collect();
        Board {
            schema,
            first_index,
            groups,
            railroads,
            utilities,
            properties,
        }
    }

    pub fn len(&self) -> usize {
        self.schema.slots.len()
    }

    pub fn is_empty(&self) -> bool {
        self.schema.slots.is_empty()
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.first_index.get(name).copied()
    }

    pub fn kind_of(&self, name: &str) -> Option<&SlotKind> {
        self.index_of(name).map(|i| &self.schema.slots[i].kind)
    }

    pub fn street(&self, name: &str) -> Option<&Street> {
        match self.kind_of(name) {
            Some(SlotKind::Street(s)) => Some(s),
            _ => None,
        }
    }

    pub fn price(&self, name: &str) -> Option<Money> {
        self.kind_of(name).and_then(SlotKind::price)
    }

    /// Streets sharing `name`'s color, including `name` itself.
    pub fn group_of(&self, name: &str) -> Option<&[String]> {
        self.street(name).and_then(|s| self.groups.get(&s.color)).map(Vec::as_slice)
    }

    /// Distinct purchasable names in board order.
    pub fn properties(&self) -> &[String] {
        &self.properties
    }

    pub fn groups(&self) -> &BTreeMap<String, Vec<String>> {
        &self.groups
    }

    pub fn jail(&self) -> usize {
        self.schema.jail_index().expect("validated board has a jail")
    }
}

/// Rolls every die once. Fair dice use a uniform draw; weighted dice walk
/// the cumulative weights.
pub fn roll_dice<R: Rng + ?Sized>(rng: &mut R, dice: &DiceConfig) -> Vec<u32> {
    (0..dice.count)
        .map(|die| match dice.die_weights.get(&die) {
            None => rng.random_range(1..=dice.faces),
            Some(weights) => {
                let u: f64 = rng.random();
                let mut acc = 0.0;
                for (face, w) in weights.iter().enumerate() {
                    acc += w;
                    if u < acc {
                        return face as u32 + 1;
                    }
                }
                // Rounding left u above the running total; take the last
                // face with nonzero weight.
                weights.iter().rposition(|&w| w > 0.0).unwrap_or(0) as u32 + 1
            }
        })
        .collect()
}

/// All dice equal. A single die never counts as doubles.
pub fn is_doubles(dice: &[u32]) -> bool {
    dice.len() >= 2 && dice.windows(2).all(|w| w[0] == w[1])
}

/// New position after moving forward, and the number of times Go was passed
/// or reached.
pub fn advance_target(position: usize, steps: usize, slots: usize) -> (usize, u32) {
    let raw = position + steps;
    (raw % slots, (raw / slots) as u32)
}

/// The owner receives no rent: unowned, mortgaged or dead owner.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct NoRentDue;

pub fn owns_whole_group(board: &Board, state: &GameState, player: PlayerId, property: &str) -> bool {
    board
        .group_of(property)
        .is_some_and(|g| g.iter().all(|s| state.properties[s].owner == Some(player)))
}

fn count_owned(names: &[String], state: &GameState, owner: PlayerId) -> usize {
    names.iter().filter(|n| state.properties[*n].owner == Some(owner)).count()
}

/// Rent the occupant of slot `slot` owes. `Ok(0)` when the occupant owns it.
pub fn compute_rent(
    board: &Board,
    state: &GameState,
    slot: usize,
    occupant: PlayerId,
    dice_sum: u32,
    modifier: RentModifier,
) -> Result<Money, NoRentDue> {
    let slot = board.schema.slots.get(slot).ok_or(NoRentDue)?;
    let prop = state.properties.get(&slot.name).ok_or(NoRentDue)?;
    let owner = prop.owner.ok_or(NoRentDue)?;
    if prop.mortgaged || !state.players[owner].alive {
        return Err(NoRentDue);
    }
    if owner == occupant {
        return Ok(0);
    }
    let rent = match &slot.kind {
        SlotKind::Street(street) => {
            let level = prop.level as usize;
            if level == 0 && owns_whole_group(board, state, owner, &slot.name) {
                street.rents[0] * 2
            } else {
                street.rents[level.min(street.rents.len() - 1)]
            }
        }
        SlotKind::Railroad { rents, .. } => {
            let n = count_owned(&board.railroads, state, owner).clamp(1, rents.len());
            let base = rents[n - 1];
            if modifier == RentModifier::NearestRailroad {
                base * 2
            } else {
                base
            }
        }
        SlotKind::Utility { multipliers, .. } => {
            let mult = if modifier == RentModifier::NearestUtility {
                10
            } else {
                let n = count_owned(&board.utilities, state, owner).clamp(1, multipliers.len());
                multipliers[n - 1]
            };
            mult * dice_sum as Money
        }
        _ => return Err(NoRentDue),
    };
    Ok(rent)
}

fn group_levels<'a>(board: &'a Board, state: &'a GameState, property: &str) -> impl Iterator<Item = u8> + 'a {
    board
        .group_of(property)
        .unwrap_or(&[])
        .iter()
        .map(move |s| state.properties[s].level)
}

/// Houses and hotels currently standing.
pub fn housing_in_use(board: &Board, state: &GameState) -> (u32, u32) {
    let hotel = board.schema.constants.hotel_level;
    state.properties.values().fold((0, 0), |(h, t), p| {
        if p.level >= hotel {
            (h, t + 1)
        } else {
            (h + p.level as u32, t)
        }
    })
}

fn stock_allows(board: &Board, state: &GameState, from_level: u8, to_level: u8) -> bool {
    let c = &board.schema.constants;
    if c.max_houses.is_none() && c.max_hotels.is_none() {
        return true;
    }
    let (houses, hotels) = housing_in_use(board, state);
    let contrib = |level: u8| -> (i64, i64) {
        if level >= c.hotel_level {
            (0, 1)
        } else {
            (level as i64, 0)
        }
    };
    let (h0, t0) = contrib(from_level);
    let (h1, t1) = contrib(to_level);
    let houses = houses as i64 - h0 + h1;
    let hotels = hotels as i64 - t0 + t1;
    c.max_houses.is_none_or(|m| houses <= m as i64) && c.max_hotels.is_none_or(|m| hotels <= m as i64)
}

/// Cost of the next improvement if `player` may build on `property` now.
pub fn improvement_cost(board: &Board, state: &GameState, player: PlayerId, property: &str) -> Option<Money> {
    let street = board.street(property)?;
    let prop = state.properties.get(property)?;
    if prop.owner != Some(player) || !owns_whole_group(board, state, player, property) {
        return None;
    }
    let group = board.group_of(property)?;
    if group.iter().any(|s| state.properties[s].mortgaged) {
        return None;
    }
    if prop.level >= street.max_level() {
        return None;
    }
    // Even build: only the least-improved streets in the group may rise.
    let min = group_levels(board, state, property).min().unwrap_or(0);
    if prop.level != min {
        return None;
    }
    if !stock_allows(board, state, prop.level, prop.level + 1) {
        return None;
    }
    let cost = street.build_costs[prop.level as usize];
    (state.players[player].cash >= cost).then_some(cost)
}

/// Refund for selling one improvement level, if allowed.
pub fn improvement_refund(board: &Board, state: &GameState, player: PlayerId, property: &str) -> Option<Money> {
    let street = board.street(property)?;
    let prop = state.properties.get(property)?;
    if prop.owner != Some(player) || prop.level == 0 {
        return None;
    }
    let max = group_levels(board, state, property).max().unwrap_or(0);
    if prop.level != max {
        return None;
    }
    if !stock_allows(board, state, prop.level, prop.level - 1) {
        return None;
    }
    Some(board.schema.improvement_refund(street.build_costs[prop.level as usize - 1]))
}

/// Cash raised by mortgaging, if allowed. Streets need their whole group
/// free of improvements.
pub fn mortgage_value(board: &Board, state: &GameState, player: PlayerId, property: &str) -> Option<Money> {
    let prop = state.properties.get(property)?;
    if prop.owner != Some(player) || prop.mortgaged {
        return None;
    }
    if board.street(property).is_some() && group_levels(board, state, property).any(|l| l > 0) {
        return None;
    }
    board.price(property).map(|p| board.schema.mortgage_value(p))
}

pub fn unmortgage_cost(board: &Board, state: &GameState, player: PlayerId, property: &str) -> Option<Money> {
    let prop = state.properties.get(property)?;
    if prop.owner != Some(player) || !prop.mortgaged {
        return None;
    }
    let cost = board.schema.unmortgage_cost(board.price(property)?);
    (state.players[player].cash >= cost).then_some(cost)
}

/// Streets whose group carries improvements cannot change hands.
pub fn tradeable(board: &Board, state: &GameState, owner: PlayerId, property: &str) -> bool {
    let Some(prop) = state.properties.get(property) else {
        return false;
    };
    prop.owner == Some(owner) && !(board.street(property).is_some() && group_levels(board, state, property).any(|l| l > 0))
}

pub fn validate_trade(board: &Board, state: &GameState, offer: &TradeOffer) -> Result<(), String> {
    let n = state.players.len();
    if offer.proposer >= n || offer.responder >= n {
        return Err("unknown player in offer".into());
    }
    if offer.proposer == offer.responder {
        return Err("cannot trade with oneself".into());
    }
    if !state.players[offer.proposer].alive || !state.players[offer.responder].alive {
        return Err("both parties must be alive".into());
    }
    if offer.offered_cash < 0 || offer.requested_cash < 0 {
        return Err("cash amounts must be nonnegative".into());
    }
    if offer.offered.is_empty() && offer.requested.is_empty() {
        return Err("offer moves no property".into());
    }
    let mut names: Vec<&String> = offer.offered.iter().chain(&offer.requested).collect();
    names.sort();
    names.dedup();
    if names.len() != offer.offered.len() + offer.requested.len() {
        return Err("property listed twice".into());
    }
    for name in &offer.offered {
        if !tradeable(board, state, offer.proposer, name) {
            return Err(format!("{name} is not tradeable by the proposer"));
        }
    }
    for name in &offer.requested {
        if !tradeable(board, state, offer.responder, name) {
            return Err(format!("{name} is not tradeable by the responder"));
        }
    }
    if state.players[offer.proposer].cash < offer.offered_cash {
        return Err("proposer cannot cover offered cash".into());
    }
    if state.players[offer.responder].cash < offer.requested_cash {
        return Err("responder cannot cover requested cash".into());
    }
    Ok(())
}

/// Asset-management actions open to `player` (improve, sell, mortgage,
/// unmortgage), in board order.
pub fn asset_actions(board: &Board, state: &GameState, player: PlayerId, allow_spending: bool) -> Vec<ActionKind> {
    let mut out = Vec::new();
    for name in board.properties() {
        if state.properties[name].owner != Some(player) {
            continue;
        }
        if allow_spending && improvement_cost(board, state, player, name).is_some() {
            out.push(ActionKind::Improve { property: name.clone() });
        }
        if improvement_refund(board, state, player, name).is_some() {
            out.push(ActionKind::SellImprovement { property: name.clone() });
        }
        if mortgage_value(board, state, player, name).is_some() {
            out.push(ActionKind::Mortgage { property: name.clone() });
        }
        if allow_spending && unmortgage_cost(board, state, player, name).is_some() {
            out.push(ActionKind::Unmortgage { property: name.clone() });
        }
    }
    out
}
