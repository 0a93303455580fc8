//! Sequential multi-round auction encoder.
//!
//! Each round every bidder reports a valuation from a finite grid to the
//! mediator, which (seeing all reports and previous outcomes, never the
//! valuations) picks an outcome: no sale, or a winner together with a
//! payment from the grid `{0, step, 2*step, ...}` capped by the winner's
//! remaining budget. Bidder utilities are quasilinear in true valuations,
//! budgets shrink by payments, and the mediator's utility is total
//! payments. The direct strategy is truthful reporting.
//!
//! Valuations are drawn uniformly from the grid, one per item per bidder.
//! By default bidders observe all of their own item valuations before the
//! first round (`upfront_valuations`); the alternative reveals each round's
//! valuation just before that round's report.
//!
//! Budgets and payments are tracked in integer multiples of `payment_step`
//! so identical histories hash identically.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::game::{
    ExtensiveFormGame, GameBuilder, GameError, GameResult, SequenceFormStrategy, Treeplex,
};

use super::{MagSource, MediatorAugmentedGame};

/// Outcome of one auction round.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RoundOutcome {
    /// Winning bidder (1-based), or `None` for no sale.
    pub winner: Option<usize>,
    pub payment: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct AuctionSpec {
    pub rounds: usize,
    /// Valuation grid, ascending, within [0, 1].
    pub valuations: Vec<f64>,
    /// Starting budget per bidder.
    pub budget: f64,
    pub bidders: usize,
    /// Payment grid resolution.
    pub payment_step: f64,
    /// Every bidder sees all past rounds' reports, not just outcomes.
    pub public_bids: bool,
    /// Bidders observe all their item valuations before round one.
    pub upfront_valuations: bool,
    /// A reporting bidder sees the current round's other reports (with
    /// truthful co-bidders these are their valuations).
    pub deviator_sees_bids: bool,
}

impl AuctionSpec {
    /// The standard instance shape: `grid_points` evenly spaced valuations
    /// on [0, 1], payment step equal to the grid gap, per-round valuation
    /// draws, and a deviator who sees the current round's truthful co-bids
    /// (nature's actions are open to the deviator in the reductions).
    pub fn uniform_grid(rounds: usize, grid_points: usize, budget: f64, bidders: usize) -> Self {
        let valuations = (0..grid_points)
            .map(|k| k as f64 / (grid_points - 1) as f64)
            .collect();
        AuctionSpec {
            rounds,
            valuations,
            budget,
            bidders,
            payment_step: 1.0 / (grid_points - 1) as f64,
            public_bids: false,
            upfront_valuations: false,
            deviator_sees_bids: true,
        }
    }

    fn check(&self) -> GameResult<()> {
        if self.rounds < 1 {
            return Err(GameError::Invariant("auction needs at least one round".into()));
        }
        if self.valuations.len() < 2 {
            return Err(GameError::Invariant("valuation grid needs at least two values".into()));
        }
        if self.budget < 0.0 {
            return Err(GameError::Invariant(format!("negative budget {}", self.budget)));
        }
        if self.bidders < 2 {
            return Err(GameError::Invariant("auction needs at least two bidders".into()));
        }
        if !(self.payment_step > 0.0) || (self.budget_units() == 0 && self.budget > 0.0) {
            return Err(GameError::Invariant("payment grid empty".into()));
        }
        for w in self.valuations.windows(2) {
            if w[1] <= w[0] {
                return Err(GameError::Invariant("valuations must be ascending".into()));
            }
        }
        if self.valuations[0] < 0.0 || *self.valuations.last().unwrap() > 1.0 {
            return Err(GameError::Invariant("valuations must lie in [0, 1]".into()));
        }
        Ok(())
    }

    /// Starting budget in payment-step units.
    pub fn budget_units(&self) -> u32 {
        (self.budget / self.payment_step + 1e-9).floor() as u32
    }

    pub fn payment(&self, units: u32) -> f64 {
        units as f64 * self.payment_step
    }

    /// Payment-grid units a report index allows charging.
    fn report_units(&self, report_idx: u8) -> u32 {
        (self.valuations[report_idx as usize] / self.payment_step + 1e-9).floor() as u32
    }

    /// How many of a bidder's valuations are known entering `round`.
    fn known_vals(&self, round: usize) -> usize {
        if self.upfront_valuations {
            self.rounds
        } else {
            round + 1
        }
    }
}

/// Builds the mediator-augmented game for a sequential auction. The
/// mediator's objective (agent 0) is total payments; the direct strategies
/// are truthful reporting.
pub fn encode_sequential_auction(spec: AuctionSpec) -> GameResult<MediatorAugmentedGame> {
    spec.check()?;
    let n = spec.bidders;
    MediatorAugmentedGame::assemble(MagSource::Auction(spec), n)
}

// ---------------------------------------------------------------------------
// Infoset layout
// ---------------------------------------------------------------------------

/// Canonical infoset registry shared by every game derived from one auction
/// spec. Mediator infosets come first, then each bidder's, so all wirings
/// agree on ids.
pub(crate) struct AuctionLayout {
    /// Key -> infoset id.
    ids: HashMap<Vec<u32>, usize>,
    /// id -> (agent, action labels, truthful action for bidder infosets).
    decls: Vec<(usize, Vec<String>, Option<usize>)>,
}

/// Public state: reports and outcomes of rounds so far, plus remaining
/// budgets in payment units.
#[derive(Clone)]
struct PublicState {
    /// Per completed or current round, everyone's reported value indices.
    reports: Vec<Vec<u8>>,
    /// Per completed round: (winner 0-based or `u8::MAX`, payment units).
    outcomes: Vec<(u8, u32)>,
    budgets: Vec<u32>,
}

impl PublicState {
    fn start(spec: &AuctionSpec) -> Self {
        PublicState {
            reports: Vec::new(),
            outcomes: Vec::new(),
            budgets: vec![spec.budget_units(); spec.bidders],
        }
    }

    fn mediator_key(&self) -> Vec<u32> {
        let mut key = vec![0u32];
        for r in &self.reports {
            for &x in r {
                key.push(x as u32);
            }
        }
        key.push(u32::MAX);
        for &(w, p) in &self.outcomes {
            key.push(w as u32);
            key.push(p);
        }
        key
    }

    /// What bidder `bidder` knows: its own valuations revealed so far, its
    /// own reports, all public outcomes and (with public bids) everyone's
    /// completed-round reports.
    fn bidder_key(
        &self,
        spec: &AuctionSpec,
        bidder: usize,
        vals: &[u8],
        reps: &[u8],
        others_current: Option<&[u8]>,
    ) -> Vec<u32> {
        let mut key = vec![bidder as u32];
        for &v in vals {
            key.push(v as u32);
        }
        key.push(u32::MAX);
        for &r in reps {
            key.push(r as u32);
        }
        key.push(u32::MAX);
        for &(w, p) in &self.outcomes {
            key.push(w as u32);
            key.push(p);
        }
        if spec.public_bids || spec.deviator_sees_bids {
            key.push(u32::MAX);
            for round in self.reports.iter().take(self.outcomes.len()) {
                for &r in round {
                    key.push(r as u32);
                }
            }
        }
        if let Some(cur) = others_current {
            key.push(u32::MAX - 1);
            for &r in cur {
                key.push(r as u32);
            }
        }
        key
    }
}

/// Mediator actions: no sale first, then each winner with each payment the
/// winner can both afford and has bid for, ascending. A winner is never
/// charged beyond its own report, which is what gives bidders an outside
/// option (report low, pay little).
fn mediator_actions(budgets: &[u32], report_caps: &[u32]) -> Vec<(Option<usize>, u32)> {
    let mut acts = vec![(None, 0u32)];
    for (b, &budget) in budgets.iter().enumerate() {
        for pay in 0..=budget.min(report_caps[b]) {
            acts.push((Some(b + 1), pay));
        }
    }
    acts
}

fn mediator_action_labels(
    spec: &AuctionSpec,
    budgets: &[u32],
    report_caps: &[u32],
) -> Vec<String> {
    mediator_actions(budgets, report_caps)
        .into_iter()
        .map(|(w, p)| match w {
            None => "pass".to_string(),
            Some(i) => format!("w{}:{}", i, spec.payment(p)),
        })
        .collect()
}

impl AuctionLayout {
    fn build(spec: &AuctionSpec) -> AuctionLayout {
        let mut layout = AuctionLayout {
            ids: HashMap::new(),
            decls: Vec::new(),
        };
        layout.walk_mediator(spec, &mut PublicState::start(spec), 0);
        for bidder in 1..=spec.bidders {
            let mut vals = Vec::new();
            layout.walk_bidder(
                spec,
                bidder,
                &mut PublicState::start(spec),
                &mut vals,
                &mut Vec::new(),
                0,
            );
        }
        layout
    }

    fn declare(
        &mut self,
        key: Vec<u32>,
        agent: usize,
        labels: Vec<String>,
        truthful: Option<usize>,
    ) {
        let next = self.decls.len();
        let prev = self.ids.insert(key, next);
        debug_assert!(prev.is_none(), "duplicate infoset key");
        self.decls.push((agent, labels, truthful));
    }

    /// Every mediator infoset, over all report/outcome histories.
    fn walk_mediator(&mut self, spec: &AuctionSpec, st: &mut PublicState, round: usize) {
        if round == spec.rounds {
            return;
        }
        let nv = spec.valuations.len() as u8;
        let mut reports = vec![0u8; spec.bidders];
        loop {
            st.reports.push(reports.clone());
            let caps: Vec<u32> = reports.iter().map(|&r| spec.report_units(r)).collect();
            let key = st.mediator_key();
            if !self.ids.contains_key(&key) {
                self.declare(key, 0, mediator_action_labels(spec, &st.budgets, &caps), None);
            }
            for (w, p) in mediator_actions(&st.budgets, &caps) {
                st.outcomes.push((w.map(|x| (x - 1) as u8).unwrap_or(u8::MAX), p));
                if let Some(win) = w {
                    st.budgets[win - 1] -= p;
                }
                self.walk_mediator(spec, st, round + 1);
                if let Some(win) = w {
                    st.budgets[win - 1] += p;
                }
                st.outcomes.pop();
            }
            st.reports.pop();
            let mut k = spec.bidders;
            loop {
                if k == 0 {
                    return;
                }
                k -= 1;
                reports[k] += 1;
                if reports[k] < nv {
                    break;
                }
                reports[k] = 0;
            }
        }
    }

    /// Every infoset of one bidder. `vals` holds the valuations the bidder
    /// has seen; with upfront valuations the full vector is enumerated
    /// before round zero.
    fn walk_bidder(
        &mut self,
        spec: &AuctionSpec,
        bidder: usize,
        st: &mut PublicState,
        vals: &mut Vec<u8>,
        reps: &mut Vec<u8>,
        round: usize,
    ) {
        if round == spec.rounds {
            return;
        }
        let nv = spec.valuations.len();
        if vals.len() < spec.known_vals(round) {
            // Reveal the next valuation (or, upfront, the whole vector).
            for v in 0..nv {
                vals.push(v as u8);
                self.walk_bidder(spec, bidder, st, vals, reps, round);
                vals.pop();
            }
            return;
        }

        // Continuations depend on the public outcome and on everyone's
        // reports this round when those are observable.
        let other_combos = if spec.public_bids || spec.deviator_sees_bids {
            nv.pow((spec.bidders - 1) as u32)
        } else {
            1
        };
        for combo in 0..other_combos {
            let mut others = vec![0u8; spec.bidders - 1];
            let mut rem = combo;
            for slot in &mut others {
                *slot = (rem % nv) as u8;
                rem /= nv;
            }
            let key = st.bidder_key(
                spec,
                bidder,
                vals,
                reps,
                spec.deviator_sees_bids.then_some(others.as_slice()),
            );
            if !self.ids.contains_key(&key) {
                let labels = spec.valuations.iter().map(|x| format!("r{x}")).collect();
                self.declare(key, bidder, labels, Some(vals[round] as usize));
            }
            for rep in 0..nv {
                reps.push(rep as u8);
                let mut full = vec![0u8; spec.bidders];
                let mut o = others.iter();
                for j in 1..=spec.bidders {
                    full[j - 1] = if j == bidder { rep as u8 } else { *o.next().unwrap() };
                }
                st.reports.push(full);
                let free_caps = vec![u32::MAX; spec.bidders];
                for (w, p) in mediator_actions(&st.budgets, &free_caps) {
                    st.outcomes.push((w.map(|x| (x - 1) as u8).unwrap_or(u8::MAX), p));
                    if let Some(win) = w {
                        st.budgets[win - 1] -= p;
                    }
                    self.walk_bidder(spec, bidder, st, vals, reps, round + 1);
                    if let Some(win) = w {
                        st.budgets[win - 1] += p;
                    }
                    st.outcomes.pop();
                }
                st.reports.pop();
                reps.pop();
            }
        }
    }

    fn id(&self, key: &[u32]) -> usize {
        *self.ids.get(key).expect("infoset key enumerated")
    }
}

// ---------------------------------------------------------------------------
// Tree construction
// ---------------------------------------------------------------------------

struct TreeCtx<'a> {
    spec: &'a AuctionSpec,
    layout: &'a AuctionLayout,
    affine: &'a [(f64, f64)],
    /// Which bidders report freely; the rest are wired to truthful.
    free: Vec<bool>,
    builder: GameBuilder,
    outcomes: Option<Vec<Vec<RoundOutcome>>>,
}

impl AuctionSpec {
    pub(crate) fn build_wired(
        &self,
        affine: &[(f64, f64)],
        deviator: Option<usize>,
    ) -> GameResult<(ExtensiveFormGame, Option<Vec<Vec<RoundOutcome>>>)> {
        self.check()?;
        let layout = AuctionLayout::build(self);
        let mut free = vec![false; self.bidders + 1];
        if let Some(i) = deviator {
            free[i] = true;
        }
        self.build_game(&layout, affine, free, deviator.is_none())
    }

    pub(crate) fn materialize(
        &self,
        _num_players: usize,
        affine: &[(f64, f64)],
    ) -> GameResult<ExtensiveFormGame> {
        self.check()?;
        if self.deviator_sees_bids {
            return Err(GameError::Invariant(
                "deviator_sees_bids instances cannot be materialized; the visibility is \
                 defined against truthful co-bidders"
                    .into(),
            ));
        }
        let est = self.size_estimate();
        if est > 20_000_000 {
            return Err(GameError::Invariant(format!(
                "auction tree too large to materialize (~{est} terminals)"
            )));
        }
        let layout = AuctionLayout::build(self);
        let free = vec![true; self.bidders + 1];
        Ok(self.build_game(&layout, affine, free, false)?.0)
    }

    /// Rough terminal count of the full (unwired) tree.
    fn size_estimate(&self) -> u128 {
        let nv = self.valuations.len() as u128;
        let outs = 1 + self.bidders as u128 * (self.budget_units() as u128 + 1);
        let per_round = nv.pow(self.bidders as u32 * 2) * outs;
        per_round.saturating_pow(self.rounds as u32)
    }

    fn build_game(
        &self,
        layout: &AuctionLayout,
        affine: &[(f64, f64)],
        free: Vec<bool>,
        record_outcomes: bool,
    ) -> GameResult<(ExtensiveFormGame, Option<Vec<Vec<RoundOutcome>>>)> {
        let mut builder = GameBuilder::new(self.bidders);
        for (agent, labels, _) in &layout.decls {
            builder.infoset(*agent, "", labels.clone());
        }
        let mut ctx = TreeCtx {
            spec: self,
            layout,
            affine,
            free,
            builder,
            outcomes: record_outcomes.then(Vec::new),
        };
        let mut st = PublicState::start(self);
        // vals[b][r]: bidder b's valuation for round r, as revealed.
        let mut vals: Vec<Vec<u8>> = vec![Vec::new(); self.bidders + 1];
        let mut reps: Vec<Vec<u8>> = vec![Vec::new(); self.bidders + 1];
        let mut utils = vec![0.0; self.bidders + 1];
        let mut collected = 0.0;
        let root = reveal(
            &mut ctx,
            &mut st,
            &mut vals,
            &mut reps,
            &mut utils,
            &mut collected,
            0,
            1,
        );
        let TreeCtx { builder, outcomes, .. } = ctx;
        let game = builder.finish(root)?;
        return Ok((game, outcomes));

        /// Draws valuations until every bidder knows what this round
        /// requires, then runs the reports.
        #[allow(clippy::too_many_arguments)]
        fn reveal(
            ctx: &mut TreeCtx,
            st: &mut PublicState,
            vals: &mut Vec<Vec<u8>>,
            reps: &mut Vec<Vec<u8>>,
            utils: &mut Vec<f64>,
            collected: &mut f64,
            round: usize,
            bidder: usize,
        ) -> usize {
            if round == ctx.spec.rounds {
                let mut u = vec![0.0; ctx.spec.bidders + 1];
                u[0] = *collected;
                u[1..].copy_from_slice(&utils[1..]);
                for (a, v) in u.iter_mut().enumerate() {
                    *v = ctx.affine[a].0 * *v + ctx.affine[a].1;
                }
                let t = ctx.builder.terminal(u);
                if let Some(out) = &mut ctx.outcomes {
                    let label = st
                        .outcomes
                        .iter()
                        .map(|&(w, p)| RoundOutcome {
                            winner: (w != u8::MAX).then(|| w as usize + 1),
                            payment: ctx.spec.payment(p),
                        })
                        .collect();
                    out.push(label);
                }
                return t;
            }
            if bidder > ctx.spec.bidders {
                st.reports.push(vec![0; ctx.spec.bidders]);
                let node = report(ctx, st, vals, reps, utils, collected, round, 1);
                st.reports.pop();
                return node;
            }
            let need = ctx.spec.known_vals(round);
            if vals[bidder].len() >= need {
                return reveal(ctx, st, vals, reps, utils, collected, round, bidder + 1);
            }
            // One chance node per missing valuation, in bidder order.
            let nv = ctx.spec.valuations.len();
            let p = 1.0 / nv as f64;
            let mut branches = Vec::with_capacity(nv);
            for v in 0..nv {
                vals[bidder].push(v as u8);
                branches.push((p, reveal(ctx, st, vals, reps, utils, collected, round, bidder)));
                vals[bidder].pop();
            }
            ctx.builder.chance(branches)
        }

        /// Report of `bidder` for `round`: a decision node when free,
        /// forced truthful otherwise.
        #[allow(clippy::too_many_arguments)]
        fn report(
            ctx: &mut TreeCtx,
            st: &mut PublicState,
            vals: &mut Vec<Vec<u8>>,
            reps: &mut Vec<Vec<u8>>,
            utils: &mut Vec<f64>,
            collected: &mut f64,
            round: usize,
            bidder: usize,
        ) -> usize {
            if bidder > ctx.spec.bidders {
                return mediator_turn(ctx, st, vals, reps, utils, collected, round);
            }
            let truthful = vals[bidder][round] as usize;
            if ctx.free[bidder] {
                let nv = ctx.spec.valuations.len();
                let others: Vec<u8> = (1..=ctx.spec.bidders)
                    .filter(|&j| j != bidder)
                    .map(|j| vals[j][round])
                    .collect();
                let key = st.bidder_key(
                    ctx.spec,
                    bidder,
                    &vals[bidder],
                    &reps[bidder],
                    ctx.spec.deviator_sees_bids.then_some(others.as_slice()),
                );
                let iid = ctx.layout.id(&key);
                let mut children = Vec::with_capacity(nv);
                for rep in 0..nv {
                    reps[bidder].push(rep as u8);
                    st.reports.last_mut().unwrap()[bidder - 1] = rep as u8;
                    children.push(report(ctx, st, vals, reps, utils, collected, round, bidder + 1));
                    reps[bidder].pop();
                }
                ctx.builder.agent(bidder, iid, children)
            } else {
                reps[bidder].push(truthful as u8);
                st.reports.last_mut().unwrap()[bidder - 1] = truthful as u8;
                let node = report(ctx, st, vals, reps, utils, collected, round, bidder + 1);
                reps[bidder].pop();
                node
            }
        }

        fn mediator_turn(
            ctx: &mut TreeCtx,
            st: &mut PublicState,
            vals: &mut Vec<Vec<u8>>,
            reps: &mut Vec<Vec<u8>>,
            utils: &mut Vec<f64>,
            collected: &mut f64,
            round: usize,
        ) -> usize {
            let key = st.mediator_key();
            let iid = ctx.layout.id(&key);
            let caps: Vec<u32> = st
                .reports
                .last()
                .unwrap()
                .iter()
                .map(|&r| ctx.spec.report_units(r))
                .collect();
            let actions = mediator_actions(&st.budgets, &caps);
            let mut children = Vec::with_capacity(actions.len());
            for (w, pay) in actions {
                let amount = ctx.spec.payment(pay);
                st.outcomes.push((w.map(|x| (x - 1) as u8).unwrap_or(u8::MAX), pay));
                let mut delta_u = 0.0;
                if let Some(win) = w {
                    st.budgets[win - 1] -= pay;
                    let v_true = ctx.spec.valuations[vals[win][round] as usize];
                    delta_u = v_true - amount;
                    utils[win] += delta_u;
                    *collected += amount;
                }
                children.push(reveal(ctx, st, vals, reps, utils, collected, round + 1, 1));
                if let Some(win) = w {
                    st.budgets[win - 1] += pay;
                    utils[win] -= delta_u;
                    *collected -= amount;
                }
                st.outcomes.pop();
            }
            ctx.builder.agent(0, iid, children)
        }
    }

    pub(crate) fn direct_strategy(
        &self,
        player: usize,
        tp: &Treeplex,
    ) -> GameResult<SequenceFormStrategy> {
        let layout = AuctionLayout::build(self);
        let picks: Vec<usize> = tp
            .infosets()
            .iter()
            .map(|inf| {
                layout.decls[inf.game_infoset]
                    .2
                    .expect("bidder infoset has a truthful action")
            })
            .collect();
        let _ = player;
        Ok(SequenceFormStrategy::pure(tp, &picks))
    }
}

// ---------------------------------------------------------------------------
// Fixed mechanisms
// ---------------------------------------------------------------------------

/// Classic auction rules used as baselines.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum MechanismKind {
    FirstPrice,
    SecondPrice,
    /// Second price with a reserve; no sale when every effective bid is
    /// below the reserve.
    SecondPriceReserve(f64),
}

/// Builds the mediator strategy implementing a classic rule, round by
/// round. Bids are capped by remaining budgets before comparison (a bidder
/// cannot owe more than it has left), tied effective bids split the win
/// uniformly, and a reserve no effective bid meets ends in no sale.
pub fn fixed_mechanism(
    kind: MechanismKind,
    m: &MediatorAugmentedGame,
) -> GameResult<SequenceFormStrategy> {
    let spec = m
        .auction_spec()
        .ok_or_else(|| GameError::Dimension("fixed mechanisms need an auction game".into()))?
        .clone();
    if let MechanismKind::SecondPriceReserve(p) = kind {
        let units = p / spec.payment_step;
        if p < 0.0 || (units - units.round()).abs() > 1e-9 || p > spec.budget {
            return Err(GameError::Invariant(format!(
                "reserve {p} is not on the payment grid"
            )));
        }
    }
    let layout = AuctionLayout::build(&spec);
    let tp = m.mediator_treeplex();

    let mut key_of_id: Vec<Option<&Vec<u32>>> = vec![None; layout.decls.len()];
    for (key, &id) in &layout.ids {
        key_of_id[id] = Some(key);
    }
    let mut behavioral = vec![0.0; tp.num_sequences()];
    for inf in tp.infosets() {
        let key = key_of_id[inf.game_infoset].expect("mediator infoset key");
        let (reports, budgets) = decode_mediator_key(&spec, key);
        let caps: Vec<u32> = reports
            .iter()
            .map(|&r| (r / spec.payment_step + 1e-9).floor() as u32)
            .collect();
        let actions = mediator_actions(&budgets, &caps);
        let outcomes = mechanism_outcomes(kind, &spec, &reports, &budgets);
        let share = 1.0 / outcomes.len() as f64;
        for outcome in outcomes {
            let a = actions
                .iter()
                .position(|&x| x == outcome)
                .expect("rule outcome is a legal action");
            behavioral[inf.seq_start + a] += share;
        }
    }
    Ok(SequenceFormStrategy::from_behavioral(tp, &behavioral))
}

/// One round of the rule: the outcomes the rule mixes over uniformly.
/// `reports` are this round's reported valuations, `budgets` the remaining
/// budgets in grid units.
fn mechanism_outcomes(
    kind: MechanismKind,
    spec: &AuctionSpec,
    reports: &[f64],
    budgets: &[u32],
) -> Vec<(Option<usize>, u32)> {
    let eff: Vec<f64> = reports
        .iter()
        .zip(budgets)
        .map(|(&r, &b)| r.min(spec.payment(b)))
        .collect();
    let top = eff.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let winners: Vec<usize> = (0..eff.len()).filter(|&i| eff[i] == top).collect();
    let to_units = |x: f64| -> u32 { (x / spec.payment_step + 1e-9).floor() as u32 };
    let payment_for = |w: usize| -> f64 {
        let second = eff
            .iter()
            .enumerate()
            .filter(|&(i, _)| i != w)
            .map(|(_, &e)| e)
            .fold(0.0f64, f64::max);
        match kind {
            MechanismKind::FirstPrice => eff[w],
            MechanismKind::SecondPrice => second,
            MechanismKind::SecondPriceReserve(p) => second.max(p),
        }
    };
    if let MechanismKind::SecondPriceReserve(p) = kind {
        if top < p {
            return vec![(None, 0)];
        }
    }
    winners
        .into_iter()
        .map(|w| (Some(w + 1), to_units(payment_for(w))))
        .collect()
}

fn decode_mediator_key(spec: &AuctionSpec, key: &[u32]) -> (Vec<f64>, Vec<u32>) {
    // Layout: [0, reports..., MAX, (winner, payment)...]; the current
    // round's reports are the last `bidders` entries of the report block.
    let sep = key.iter().position(|&x| x == u32::MAX).expect("separator");
    let reports: Vec<f64> = key[sep - spec.bidders..sep]
        .iter()
        .map(|&ri| spec.valuations[ri as usize])
        .collect();
    let mut budgets = vec![spec.budget_units(); spec.bidders];
    let mut k = sep + 1;
    while k + 1 < key.len() {
        let w = key[k];
        let p = key[k + 1];
        if w != u8::MAX as u32 {
            budgets[w as usize] -= p;
        }
        k += 2;
    }
    (reports, budgets)
}
