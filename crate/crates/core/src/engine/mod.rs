//! Runs one game among four agents. Deterministic in (schema, agents, seed):
//! every state change goes through a logged event, and agents are consulted
//! one at a time in seat order.

pub mod events;
pub mod rules;
pub mod state;

use std::sync::Arc;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use events::{
    parse_event_log, write_event_log, EventKind, GameEvent, GameResult, JailExitMethod, JailReason, LogError,
    ParsedLog, Party, PlayerId, Termination, Transfer,
};
pub use rules::{compute_rent, roll_dice, Board, NoRentDue, RentModifier};
pub use state::{ApplyError, GameState, PlayerState, PropertyState};

use crate::agents::{
    ActionKind, Agent, DecisionPoint, DecisionRequest, LegalMenu, PublicPlayer, PublicProperty, Snapshot, TradeOffer,
};
use crate::board::{validate_schema, BoardSchema, CardEffect, Deck, Money, NearestKind, SlotKind, Violation};

/// Players per game.
pub const SEATS: usize = 4;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct GameLimits {
    /// The game is a draw once every alive player has completed this many
    /// round trips.
    pub round_trip_cap: u32,
    /// Largest board a novelty may produce.
    pub max_board_size: usize,
    /// Hard stop on player-turns; reached only by pathological boards and
    /// reported as a round-trip-cap draw.
    pub max_turns: u64,
    /// Actions one agent may take in a single pre-roll phase.
    pub max_phase_actions: u32,
    pub max_offers_per_turn: usize,
    /// Number of trailing public events included in each decision request.
    pub recent_events: usize,
}

impl Default for GameLimits {
    fn default() -> Self {
        GameLimits {
            round_trip_cap: 500,
            max_board_size: 120,
            max_turns: 1_000_000,
            max_phase_actions: 32,
            max_offers_per_turn: 4,
            recent_events: 12,
        }
    }
}

#[derive(Debug, Error)]
pub enum GameError {
    #[error("a game needs exactly {SEATS} agents, got {0}")]
    SeatCount(usize),
    #[error("board is invalid: {}", .0.iter().map(|v| v.to_string()).collect::<Vec<_>>().join("; "))]
    InvalidBoard(Vec<Violation>),
    #[error("round-trip cap must be at least 1")]
    ZeroCap,
}

/// Everything a finished game produced.
#[derive(Debug, Clone)]
pub struct GameRecord {
    pub result: GameResult,
    pub events: Vec<GameEvent>,
    pub final_state: GameState,
}

impl GameRecord {
    pub fn log_text(&self) -> String {
        write_event_log(&self.events, &self.result)
    }
}

pub fn run_game(
    schema: Arc<BoardSchema>,
    agents: &mut [Box<dyn Agent>],
    seed: u64,
    limits: &GameLimits,
) -> Result<GameRecord, GameError> {
    run_game_with_detection(schema, agents, seed, limits, &[])
}

/// As [`run_game`], with seats whose novelty signal was already raised
/// earlier in the tournament. Their signal is carried into this game's log.
pub fn run_game_with_detection(
    schema: Arc<BoardSchema>,
    agents: &mut [Box<dyn Agent>],
    seed: u64,
    limits: &GameLimits,
    latched: &[bool],
) -> Result<GameRecord, GameError> {
    if agents.len() != SEATS {
        return Err(GameError::SeatCount(agents.len()));
    }
    if limits.round_trip_cap == 0 {
        return Err(GameError::ZeroCap);
    }
    let violations = validate_schema(&schema);
    if !violations.is_empty() {
        return Err(GameError::InvalidBoard(violations));
    }
    let mut latched = latched.to_vec();
    latched.resize(SEATS, false);
    Ok(Game::new(schema, agents, seed, limits.clone(), latched).run())
}

pub(crate) struct Game<'a> {
    board: Board,
    limits: GameLimits,
    state: GameState,
    rng: ChaCha8Rng,
    agents: &'a mut [Box<dyn Agent>],
    events: Vec<GameEvent>,
    turn: u64,
    bankruptcy_order: Vec<PlayerId>,
    faults: Vec<u32>,
    latched: Vec<bool>,
}

enum JailOutcome {
    Released,
    TurnOver,
}

impl<'a> Game<'a> {
    pub(crate) fn new(
        schema: Arc<BoardSchema>,
        agents: &'a mut [Box<dyn Agent>],
        seed: u64,
        limits: GameLimits,
        latched: Vec<bool>,
    ) -> Self {
        let seats = agents.len();
        Game {
            state: GameState::new(&schema, seats),
            board: Board::new(schema),
            limits,
            rng: ChaCha8Rng::seed_from_u64(seed),
            agents,
            events: Vec::new(),
            turn: 0,
            bankruptcy_order: Vec::new(),
            faults: vec![0; seats],
            latched,
        }
    }

    fn schema(&self) -> &BoardSchema {
        &self.board.schema
    }

    fn emit(&mut self, player: Option<PlayerId>, kind: EventKind) {
        let event = GameEvent {
            turn: self.turn,
            player,
            kind,
        };
        if let Err(e) = self.state.apply(&self.board.schema, &event) {
            panic!("engine produced an inconsistent event {event:?}: {e}");
        }
        self.events.push(event);
    }

    fn alive(&self, p: PlayerId) -> bool {
        self.state.players[p].alive
    }

    fn cash(&self, p: PlayerId) -> Money {
        self.state.players[p].cash
    }

    fn alive_count(&self) -> usize {
        self.state.alive_players().count()
    }

    pub(crate) fn start(&mut self) {
        let seats: Vec<String> = self.agents.iter().map(|a| a.name().to_string()).collect();
        let mut chance: Vec<usize> = (0..self.schema().card_decks.chance.len()).collect();
        let mut chest: Vec<usize> = (0..self.schema().card_decks.community_chest.len()).collect();
        chance.shuffle(&mut self.rng);
        chest.shuffle(&mut self.rng);
        self.emit(
            None,
            EventKind::GameStart {
                seats,
                starting_cash: self.schema().constants.starting_cash,
                slots: self.board.schema.slots.iter().map(|s| s.name.clone()).collect(),
                jail: self.board.jail(),
                chance_order: chance,
                community_chest_order: chest,
            },
        );
        for seat in 0..self.agents.len() {
            if self.latched[seat] {
                self.emit(Some(seat), EventKind::NoveltySignal);
            }
        }
        let schema = self.board.schema.clone();
        for (seat, agent) in self.agents.iter_mut().enumerate() {
            agent.game_start(seat, &schema);
        }
    }

    fn run(mut self) -> GameRecord {
        self.start();
        let seats = self.agents.len();
        let mut current = 0;
        let termination = loop {
            if self.alive_count() <= 1 {
                break Termination::LastPlayerStanding;
            }
            let cap = self.limits.round_trip_cap;
            if self.state.alive_players().all(|p| self.state.players[p].round_trips >= cap)
                || self.turn >= self.limits.max_turns
            {
                break Termination::RoundTripCap;
            }
            if self.alive(current) {
                self.turn += 1;
                self.play_turn(current);
            }
            current = (current + 1) % seats;
        };
        self.finish(termination)
    }

    fn finish(mut self, termination: Termination) -> GameRecord {
        let winner = match termination {
            Termination::LastPlayerStanding => self.state.alive_players().next(),
            Termination::RoundTripCap => None,
        };
        self.emit(None, EventKind::GameEnd { winner, termination });
        let result = GameResult {
            winner,
            turns: self.turn,
            round_trips: self.state.players.iter().map(|p| p.round_trips).collect(),
            bankruptcy_order: self.bankruptcy_order.clone(),
            termination,
            novelty_signals: self.state.players.iter().map(|p| p.novelty_signaled).collect(),
            faults: self.faults.clone(),
        };
        for agent in self.agents.iter_mut() {
            agent.game_end(&result);
        }
        GameRecord {
            result,
            events: self.events,
            final_state: self.state,
        }
    }

    fn play_turn(&mut self, p: PlayerId) {
        self.pre_roll_phase(p);
        if !self.alive(p) {
            return;
        }
        self.trade_phase(p);
        if !self.alive(p) {
            return;
        }
        if self.state.players[p].in_jail {
            match self.jail_turn(p) {
                JailOutcome::Released => {}
                JailOutcome::TurnOver => return,
            }
        }
        let mut doubles = 0;
        loop {
            let dice = self.roll(p);
            let sum: u32 = dice.iter().sum();
            if rules::is_doubles(&dice) {
                doubles += 1;
                if doubles == 3 {
                    self.emit(Some(p), EventKind::JailEnter { reason: JailReason::RepeatedDoubles });
                    return;
                }
            }
            self.advance(p, sum as usize);
            self.resolve_landing(p, sum, RentModifier::Normal);
            if !self.alive(p) || self.state.players[p].in_jail || !rules::is_doubles(&dice) || self.alive_count() <= 1 {
                return;
            }
        }
    }

    fn roll(&mut self, p: PlayerId) -> Vec<u32> {
        let dice = rules::roll_dice(&mut self.rng, &self.board.schema.dice);
        self.emit(Some(p), EventKind::Roll { dice: dice.clone() });
        dice
    }

    /// Moves forward; credits the Go increment once per lap completed.
    pub(crate) fn advance(&mut self, p: PlayerId, steps: usize) {
        let from = self.state.players[p].position;
        let (to, laps) = rules::advance_target(from, steps, self.board.len());
        self.emit(Some(p), EventKind::Move { from, to });
        if laps > 0 {
            let amount = self.schema().go_increment * laps as Money;
            self.emit(
                Some(p),
                EventKind::PassGo {
                    laps,
                    payer: Party::Bank,
                    payee: Party::Player(p),
                    amount,
                },
            );
        }
    }

    fn pre_roll_phase(&mut self, p: PlayerId) {
        for _ in 0..self.limits.max_phase_actions {
            let mut actions = rules::asset_actions(&self.board, &self.state, p, true);
            if actions.is_empty() {
                return;
            }
            actions.push(ActionKind::EndPhase);
            let menu = LegalMenu {
                actions,
                trades_allowed: false,
            };
            match self.ask(p, DecisionPoint::PreRollActions, menu, ActionKind::EndPhase) {
                ActionKind::Improve { property } => self.improve(p, &property),
                ActionKind::SellImprovement { property } => self.sell_improvement(p, &property),
                ActionKind::Mortgage { property } => self.mortgage(p, &property),
                ActionKind::Unmortgage { property } => self.unmortgage(p, &property),
                _ => return,
            }
        }
    }

    fn trade_phase(&mut self, p: PlayerId) {
        let anything_owned = self.state.properties.values().any(|prop| prop.owner.is_some());
        if !anything_owned {
            return;
        }
        let menu = LegalMenu {
            actions: vec![ActionKind::EndPhase],
            trades_allowed: true,
        };
        if let ActionKind::ProposeTrades { offers } = self.ask(p, DecisionPoint::ProposeTrades, menu, ActionKind::EndPhase) {
            self.run_offers(offers);
        }
    }

    /// Resolves offers one at a time; an offer invalidated by an earlier
    /// acceptance is rejected as stale.
    fn run_offers(&mut self, offers: Vec<TradeOffer>) {
        for offer in offers {
            let proposer = offer.proposer;
            if !self.alive(proposer) {
                return;
            }
            self.emit(Some(proposer), EventKind::TradeProposed { offer: offer.clone() });
            if let Err(reason) = rules::validate_trade(&self.board, &self.state, &offer) {
                self.emit(Some(proposer), EventKind::TradeRejected { offer, reason: format!("stale: {reason}") });
                continue;
            }
            let menu = LegalMenu {
                actions: vec![ActionKind::AcceptTrade, ActionKind::RejectTrade],
                trades_allowed: false,
            };
            let decision = DecisionPoint::RespondToTrade { offer: offer.clone() };
            match self.ask(offer.responder, decision, menu, ActionKind::RejectTrade) {
                ActionKind::AcceptTrade => {
                    let net = offer.offered_cash - offer.requested_cash;
                    let (payer, payee) = if net >= 0 {
                        (Party::Player(offer.proposer), Party::Player(offer.responder))
                    } else {
                        (Party::Player(offer.responder), Party::Player(offer.proposer))
                    };
                    self.emit(
                        Some(proposer),
                        EventKind::TradeAccepted {
                            offer,
                            payer,
                            payee,
                            amount: net.abs(),
                        },
                    );
                }
                _ => self.emit(Some(proposer), EventKind::TradeRejected { offer, reason: "declined".into() }),
            }
        }
    }

    fn jail_turn(&mut self, p: PlayerId) -> JailOutcome {
        let fine = self.schema().constants.jail_fine;
        let player = &self.state.players[p];
        let attempts = player.jail_turns;
        let mut actions = Vec::new();
        if !player.jail_cards.is_empty() {
            actions.push(ActionKind::UseJailCard);
        }
        if player.cash >= fine {
            actions.push(ActionKind::PayJailFine);
        }
        actions.push(ActionKind::RollForDoubles);
        let menu = LegalMenu {
            actions,
            trades_allowed: false,
        };
        let decision = DecisionPoint::JailChoice { attempts_used: attempts };
        match self.ask(p, decision, menu, ActionKind::RollForDoubles) {
            ActionKind::UseJailCard => {
                let deck = self.state.players[p].jail_cards[0].0;
                self.emit(Some(p), jail_exit(p, JailExitMethod::Card, Some(deck), 0));
                JailOutcome::Released
            }
            ActionKind::PayJailFine => {
                self.emit(Some(p), jail_exit(p, JailExitMethod::Fine, None, fine));
                JailOutcome::Released
            }
            _ => {
                let dice = self.roll(p);
                let sum: u32 = dice.iter().sum();
                if rules::is_doubles(&dice) {
                    self.emit(Some(p), jail_exit(p, JailExitMethod::Doubles, None, 0));
                } else if attempts + 1 >= 3 {
                    if !self.ensure_cash(p, fine, Party::Bank) {
                        return JailOutcome::TurnOver;
                    }
                    self.emit(Some(p), jail_exit(p, JailExitMethod::ForcedFine, None, fine));
                } else {
                    self.emit(Some(p), EventKind::JailStay { jail_turns: attempts + 1 });
                    return JailOutcome::TurnOver;
                }
                self.advance(p, sum as usize);
                self.resolve_landing(p, sum, RentModifier::Normal);
                JailOutcome::TurnOver
            }
        }
    }

    pub(crate) fn resolve_landing(&mut self, p: PlayerId, dice_sum: u32, modifier: RentModifier) {
        let pos = self.state.players[p].position;
        let slot = self.board.schema.slots[pos].clone();
        match &slot.kind {
            kind if kind.is_purchasable() => {
                let price = kind.price().unwrap_or(0);
                match self.state.properties[&slot.name].owner {
                    None => self.offer_purchase(p, &slot.name, price),
                    Some(owner) if owner != p => {
                        if let Ok(rent) = rules::compute_rent(&self.board, &self.state, pos, p, dice_sum, modifier) {
                            if rent > 0 && self.ensure_cash(p, rent, Party::Player(owner)) {
                                self.emit(
                                    Some(p),
                                    EventKind::RentPaid {
                                        property: slot.name.clone(),
                                        payer: Party::Player(p),
                                        payee: Party::Player(owner),
                                        amount: rent,
                                    },
                                );
                            }
                        }
                    }
                    Some(_) => {}
                }
            }
            SlotKind::Tax { amount } => {
                if self.ensure_cash(p, *amount, Party::Bank) {
                    self.emit(
                        Some(p),
                        EventKind::TaxPaid {
                            slot: slot.name.clone(),
                            payer: Party::Player(p),
                            payee: Party::Bank,
                            amount: *amount,
                        },
                    );
                }
            }
            SlotKind::Chance => self.draw_card(p, Deck::Chance, dice_sum),
            SlotKind::CommunityChest => self.draw_card(p, Deck::CommunityChest, dice_sum),
            SlotKind::GoToJail => self.emit(Some(p), EventKind::JailEnter { reason: JailReason::GoToJailSlot }),
            _ => {}
        }
    }

    fn offer_purchase(&mut self, p: PlayerId, property: &str, price: Money) {
        let bought = if self.cash(p) >= price {
            let menu = LegalMenu {
                actions: vec![ActionKind::Buy, ActionKind::Decline],
                trades_allowed: false,
            };
            let decision = DecisionPoint::BuyOrDecline {
                property: property.to_string(),
                price,
            };
            self.ask(p, decision, menu, ActionKind::Decline) == ActionKind::Buy
        } else {
            false
        };
        if bought {
            self.emit(
                Some(p),
                EventKind::Buy {
                    property: property.to_string(),
                    payer: Party::Player(p),
                    payee: Party::Bank,
                    amount: price,
                },
            );
        } else {
            self.emit(Some(p), EventKind::Decline { property: property.to_string() });
        }
    }

    fn draw_card(&mut self, p: PlayerId, deck: Deck, dice_sum: u32) {
        let Some(&idx) = self.state.deck(deck).front() else {
            return;
        };
        let card = self.schema().card_decks.deck(deck)[idx].clone();
        self.emit(
            Some(p),
            EventKind::CardDrawn {
                deck,
                card: idx,
                text: card.text.clone(),
            },
        );
        self.apply_card(p, deck, idx, &card.effect, dice_sum);
    }

    pub(crate) fn apply_card(&mut self, p: PlayerId, deck: Deck, card: usize, effect: &CardEffect, dice_sum: u32) {
        let n = self.board.len();
        let effect_event = |payer: Party, payee: Party, amount: Money| EventKind::CardEffect {
            deck,
            card,
            payer,
            payee,
            amount,
        };
        match effect {
            CardEffect::AdvanceTo { slot } => {
                let Some(target) = self.board.index_of(slot) else {
                    return;
                };
                let pos = self.state.players[p].position;
                let steps = (target + n - pos) % n;
                if steps > 0 {
                    self.advance(p, steps);
                }
                self.resolve_landing(p, dice_sum, RentModifier::Normal);
            }
            CardEffect::AdvanceNearest { kind } => {
                let pos = self.state.players[p].position;
                let found = (1..=n).find(|k| {
                    let slot = &self.board.schema.slots[(pos + k) % n];
                    match kind {
                        NearestKind::Railroad => matches!(slot.kind, SlotKind::Railroad { .. }),
                        NearestKind::Utility => matches!(slot.kind, SlotKind::Utility { .. }),
                    }
                });
                let Some(steps) = found else {
                    return;
                };
                self.advance(p, steps);
                let modifier = match kind {
                    NearestKind::Railroad => RentModifier::NearestRailroad,
                    NearestKind::Utility => RentModifier::NearestUtility,
                };
                self.resolve_landing(p, dice_sum, modifier);
            }
            CardEffect::Collect { amount } => self.emit(Some(p), effect_event(Party::Bank, Party::Player(p), *amount)),
            CardEffect::Pay { amount } => {
                if self.ensure_cash(p, *amount, Party::Bank) {
                    self.emit(Some(p), effect_event(Party::Player(p), Party::Bank, *amount));
                }
            }
            CardEffect::PayEachPlayer { amount } => {
                let others: Vec<PlayerId> = self.state.alive_players().filter(|&q| q != p).collect();
                for q in others {
                    if !self.alive(p) {
                        break;
                    }
                    if self.alive(q) && self.ensure_cash(p, *amount, Party::Player(q)) {
                        self.emit(Some(p), effect_event(Party::Player(p), Party::Player(q), *amount));
                    }
                }
            }
            CardEffect::CollectFromEachPlayer { amount } => {
                let others: Vec<PlayerId> = self.state.alive_players().filter(|&q| q != p).collect();
                for q in others {
                    if self.alive(q) && self.ensure_cash(q, *amount, Party::Player(p)) {
                        self.emit(Some(p), effect_event(Party::Player(q), Party::Player(p), *amount));
                    }
                }
            }
            CardEffect::Repairs { per_house, per_hotel } => {
                let hotel = self.schema().constants.hotel_level;
                let total: Money = self
                    .state
                    .owned_by(p)
                    .map(|(_, prop)| {
                        if prop.level >= hotel {
                            *per_hotel
                        } else {
                            prop.level as Money * per_house
                        }
                    })
                    .sum();
                if total > 0 && self.ensure_cash(p, total, Party::Bank) {
                    self.emit(Some(p), effect_event(Party::Player(p), Party::Bank, total));
                }
            }
            CardEffect::GoToJail => self.emit(Some(p), EventKind::JailEnter { reason: JailReason::Card }),
            // Retention happens when the draw is applied.
            CardEffect::GetOutOfJailFree => {}
            CardEffect::MoveBack { steps } => {
                let from = self.state.players[p].position;
                let to = (from + n - (*steps as usize % n)) % n;
                self.emit(Some(p), EventKind::Move { from, to });
                self.resolve_landing(p, dice_sum, RentModifier::Normal);
            }
        }
    }

    /// Makes sure `debtor` holds `amount`, running the shortfall procedure
    /// if needed. Returns false if the debtor went bankrupt instead.
    pub(crate) fn ensure_cash(&mut self, debtor: PlayerId, amount: Money, creditor: Party) -> bool {
        if self.cash(debtor) >= amount {
            return true;
        }
        let mut idle = 0;
        loop {
            if self.cash(debtor) >= amount {
                return true;
            }
            let assets = rules::asset_actions(&self.board, &self.state, debtor, false);
            let owns_any = self.state.owned_by(debtor).next().is_some();
            if assets.is_empty() && !owns_any {
                self.bankrupt(debtor, creditor);
                return false;
            }
            let mut actions = assets;
            actions.push(ActionKind::DeclareBankruptcy);
            actions.push(ActionKind::EndPhase);
            let menu = LegalMenu {
                actions,
                trades_allowed: owns_any,
            };
            let before = self.cash(debtor);
            let decision = DecisionPoint::RaiseCash { amount, creditor };
            match self.ask(debtor, decision, menu, ActionKind::EndPhase) {
                ActionKind::SellImprovement { property } => self.sell_improvement(debtor, &property),
                ActionKind::Mortgage { property } => self.mortgage(debtor, &property),
                ActionKind::ProposeTrades { offers } => self.run_offers(offers),
                ActionKind::DeclareBankruptcy => {
                    self.bankrupt(debtor, creditor);
                    return false;
                }
                _ => {}
            }
            if self.cash(debtor) > before {
                idle = 0;
            } else {
                idle += 1;
                if idle >= 2 {
                    self.bankrupt(debtor, creditor);
                    return false;
                }
            }
        }
    }

    /// Sells remaining improvements to the bank, then hands cash, property
    /// and retained cards to the creditor.
    fn bankrupt(&mut self, debtor: PlayerId, creditor: Party) {
        loop {
            let next = self
                .board
                .properties()
                .iter()
                .filter(|name| {
                    let prop = &self.state.properties[*name];
                    prop.owner == Some(debtor) && prop.level > 0
                })
                .max_by_key(|name| self.state.properties[*name].level)
                .cloned();
            let Some(name) = next else { break };
            let level = self.state.properties[&name].level;
            let cost = self.board.street(&name).map(|s| s.build_costs[level as usize - 1]).unwrap_or(0);
            let refund = self.schema().improvement_refund(cost);
            self.emit(
                Some(debtor),
                EventKind::SellImprovement {
                    property: name,
                    level: level - 1,
                    payer: Party::Bank,
                    payee: Party::Player(debtor),
                    amount: refund,
                },
            );
        }
        let properties: Vec<String> = self.state.owned_by(debtor).map(|(n, _)| n.clone()).collect();
        let returned_cards = self.state.players[debtor].jail_cards.clone();
        let amount = self.cash(debtor);
        let creditor = match creditor {
            Party::Player(c) if self.alive(c) && c != debtor => creditor,
            _ => Party::Bank,
        };
        self.emit(
            Some(debtor),
            EventKind::Bankruptcy {
                creditor,
                properties,
                returned_cards,
                payer: Party::Player(debtor),
                payee: creditor,
                amount,
            },
        );
        self.bankruptcy_order.push(debtor);
    }

    fn improve(&mut self, p: PlayerId, property: &str) {
        if let Some(cost) = rules::improvement_cost(&self.board, &self.state, p, property) {
            let level = self.state.properties[property].level + 1;
            self.emit(
                Some(p),
                EventKind::Improve {
                    property: property.to_string(),
                    level,
                    payer: Party::Player(p),
                    payee: Party::Bank,
                    amount: cost,
                },
            );
        }
    }

    fn sell_improvement(&mut self, p: PlayerId, property: &str) {
        if let Some(refund) = rules::improvement_refund(&self.board, &self.state, p, property) {
            let level = self.state.properties[property].level - 1;
            self.emit(
                Some(p),
                EventKind::SellImprovement {
                    property: property.to_string(),
                    level,
                    payer: Party::Bank,
                    payee: Party::Player(p),
                    amount: refund,
                },
            );
        }
    }

    fn mortgage(&mut self, p: PlayerId, property: &str) {
        if let Some(value) = rules::mortgage_value(&self.board, &self.state, p, property) {
            self.emit(
                Some(p),
                EventKind::Mortgage {
                    property: property.to_string(),
                    payer: Party::Bank,
                    payee: Party::Player(p),
                    amount: value,
                },
            );
        }
    }

    fn unmortgage(&mut self, p: PlayerId, property: &str) {
        if let Some(cost) = rules::unmortgage_cost(&self.board, &self.state, p, property) {
            self.emit(
                Some(p),
                EventKind::Unmortgage {
                    property: property.to_string(),
                    payer: Party::Player(p),
                    payee: Party::Bank,
                    amount: cost,
                },
            );
        }
    }

    fn snapshot(&self) -> Snapshot {
        let players = self
            .state
            .players
            .iter()
            .map(|p| PublicPlayer {
                position: p.position,
                cash: p.cash,
                alive: p.alive,
                in_jail: p.in_jail,
                jail_cards: p.jail_cards.len(),
                round_trips: p.round_trips,
            })
            .collect();
        let properties = self
            .state
            .properties
            .iter()
            .map(|(name, p)| {
                (
                    name.clone(),
                    PublicProperty {
                        owner: p.owner,
                        level: p.level,
                        mortgaged: p.mortgaged,
                    },
                )
            })
            .collect();
        let mut recent_events: Vec<GameEvent> = self
            .events
            .iter()
            .rev()
            .filter(|e| !matches!(e.kind, EventKind::GameStart { .. }))
            .take(self.limits.recent_events)
            .cloned()
            .collect();
        recent_events.reverse();
        Snapshot {
            turn: self.turn,
            players,
            properties,
            recent_events,
        }
    }

    /// Consults an agent. Faults and illegal answers never reach the game
    /// state: the default is substituted and the fault is logged.
    fn ask(&mut self, p: PlayerId, decision: DecisionPoint, menu: LegalMenu, default: ActionKind) -> ActionKind {
        let request = DecisionRequest {
            seat: p,
            decision,
            snapshot: self.snapshot(),
            menu,
        };
        let reply = self.agents[p].decide(&request);
        let outcome = match reply {
            Ok(action) => {
                if action.novelty_detected && !self.state.players[p].novelty_signaled {
                    self.emit(Some(p), EventKind::NoveltySignal);
                }
                self.check_action(p, &request.menu, &action.kind).map(|_| action.kind)
            }
            Err(fault) => Err(fault.to_string()),
        };
        match outcome {
            Ok(kind) => kind,
            Err(reason) => {
                self.faults[p] += 1;
                self.emit(
                    Some(p),
                    EventKind::InvalidActionSubstituted {
                        decision: request.decision.label().to_string(),
                        reason,
                        substituted: default.label().to_string(),
                    },
                );
                default
            }
        }
    }

    fn check_action(&self, p: PlayerId, menu: &LegalMenu, kind: &ActionKind) -> Result<(), String> {
        if !menu.permits(kind) {
            return Err(format!("{} is not in the legal menu", kind.label()));
        }
        if let ActionKind::ProposeTrades { offers } = kind {
            if offers.len() > self.limits.max_offers_per_turn {
                return Err(format!("at most {} offers per turn", self.limits.max_offers_per_turn));
            }
            for offer in offers {
                if offer.proposer != p {
                    return Err("offer names another proposer".into());
                }
                rules::validate_trade(&self.board, &self.state, offer)?;
            }
        }
        Ok(())
    }
}

fn jail_exit(p: PlayerId, method: JailExitMethod, card: Option<Deck>, fine: Money) -> EventKind {
    EventKind::JailExit {
        method,
        card,
        payer: Party::Player(p),
        payee: Party::Bank,
        amount: fine,
    }
}
