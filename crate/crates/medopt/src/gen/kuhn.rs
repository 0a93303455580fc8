//! Three-player Kuhn poker.
//!
//! Each player antes one chip and receives one of `r` cards, dealt without
//! replacement. Player 1 checks or bets; player 2 checks or bets after a
//! check, otherwise folds or calls; player 3 likewise. Once someone bets,
//! the remaining players respond in seat order (wrapping around), each
//! folding or calling. One bet maximum. At showdown the highest card among
//! the players still in takes the pot.

use crate::game::{ExtensiveFormGame, GameBuilder, GameError, GameResult, InfosetId, NodeId};

pub fn kuhn3(ranks: usize) -> GameResult<ExtensiveFormGame> {
    if ranks < 3 {
        return Err(GameError::Invariant(format!(
            "three-player Kuhn needs at least 3 ranks, got {ranks}"
        )));
    }
    let b = GameBuilder::new(3);
    let mut ctx = Ctx {
        b,
        infosets: std::collections::HashMap::new(),
    };

    // Deal: ordered triples of distinct cards, uniform.
    let deals = ranks * (ranks - 1) * (ranks - 2);
    let p = 1.0 / deals as f64;
    let mut outcomes = Vec::with_capacity(deals);
    for c1 in 0..ranks {
        for c2 in 0..ranks {
            for c3 in 0..ranks {
                if c1 != c2 && c1 != c3 && c2 != c3 {
                    let node = ctx.betting(&[c1, c2, c3], String::new(), 0, None, Vec::new());
                    outcomes.push((p, node));
                }
            }
        }
    }
    let root = ctx.b.chance(outcomes);
    ctx.b.finish(root)
}

struct Ctx {
    b: GameBuilder,
    /// (player, card, betting history) -> infoset.
    infosets: std::collections::HashMap<(usize, usize, String), InfosetId>,
}

impl Ctx {
    fn infoset_for(&mut self, player: usize, card: usize, history: &str, actions: [&str; 2]) -> InfosetId {
        let key = (player, card, history.to_string());
        if let Some(&id) = self.infosets.get(&key) {
            return id;
        }
        let id = self.b.infoset(
            player,
            format!("p{player}|c{card}|{history}"),
            vec![actions[0].to_string(), actions[1].to_string()],
        );
        self.infosets.insert(key, id);
        id
    }

    /// Betting state: `turn` counts moves made; before any bet, seat order
    /// is 1, 2, 3 checking or betting. After a bet by seat `bettor`, the
    /// remaining seats respond in wrap-around order.
    fn betting(
        &mut self,
        cards: &[usize; 3],
        history: String,
        turn: usize,
        bettor: Option<usize>,
        responses: Vec<(usize, bool)>,
    ) -> NodeId {
        match bettor {
            None => {
                if turn == 3 {
                    // Everyone checked: showdown among all three.
                    return self.showdown(cards, &[true, true, true], &[false, false, false]);
                }
                let seat = turn; // 0-based seat to act
                let card = cards[seat];
                let iid = self.infoset_for(seat + 1, card, &history, ["check", "bet"]);
                let check = self.betting(cards, format!("{history}k"), turn + 1, None, Vec::new());
                let bet = self.betting(
                    cards,
                    format!("{history}b"),
                    turn + 1,
                    Some(seat),
                    Vec::new(),
                );
                self.b.agent(seat + 1, iid, vec![check, bet])
            }
            Some(who_bet) => {
                if responses.len() == 2 {
                    // All others responded: showdown among bettor + callers.
                    let mut active = [false; 3];
                    let mut paid = [false; 3];
                    active[who_bet] = true;
                    paid[who_bet] = true;
                    for &(seat, called) in &responses {
                        active[seat] = called;
                        paid[seat] = called;
                    }
                    return self.showdown(cards, &active, &paid);
                }
                // Next responder after the bettor, wrapping, skipping seats
                // that already responded and the bettor.
                let mut seat = (who_bet + 1 + responses.len()) % 3;
                while seat == who_bet || responses.iter().any(|&(s, _)| s == seat) {
                    seat = (seat + 1) % 3;
                }
                let card = cards[seat];
                let iid = self.infoset_for(seat + 1, card, &history, ["fold", "call"]);
                let mut fold_responses = responses.clone();
                fold_responses.push((seat, false));
                let fold = self.betting(
                    cards,
                    format!("{history}f"),
                    turn,
                    Some(who_bet),
                    fold_responses,
                );
                let mut call_responses = responses;
                call_responses.push((seat, true));
                let call = self.betting(
                    cards,
                    format!("{history}c"),
                    turn,
                    Some(who_bet),
                    call_responses,
                );
                self.b.agent(seat + 1, iid, vec![fold, call])
            }
        }
    }

    /// `active[s]`: still in at showdown; `paid[s]`: put in the extra chip.
    fn showdown(&mut self, cards: &[usize; 3], active: &[bool; 3], paid: &[bool; 3]) -> NodeId {
        let pot: f64 = 3.0 + paid.iter().filter(|&&x| x).count() as f64;
        let winner = (0..3)
            .filter(|&s| active[s])
            .max_by_key(|&s| cards[s])
            .expect("someone is active");
        let mut u = vec![0.0; 4];
        for s in 0..3 {
            let contrib = 1.0 + if paid[s] { 1.0 } else { 0.0 };
            u[s + 1] = if s == winner { pot - contrib } else { -contrib };
        }
        self.b.terminal(u)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn kuhn3_rank3_shape() {
        let g = kuhn3(3).unwrap();
        assert_eq!(g.num_players(), 3);
        // 6 deals; zero-sum utilities.
        for z in 0..g.num_terminals() {
            let u = g.utility(z);
            assert!((u[1] + u[2] + u[3]).abs() < 1e-12);
            assert_eq!(u[0], 0.0);
        }
    }

    #[test]
    fn terminal_count_matches_exhaustive_walk() {
        // Betting structures per deal: by direct enumeration of the
        // check/bet tree (13 terminal betting lines), times deals.
        for r in [3usize, 4, 5] {
            let g = kuhn3(r).unwrap();
            let deals = r * (r - 1) * (r - 2);
            assert_eq!(g.num_terminals(), deals * 13, "rank {r}");
        }
    }

    #[test]
    fn showdown_payoffs_sum_to_zero_and_match_pot() {
        let g = kuhn3(4).unwrap();
        for z in 0..g.num_terminals() {
            let u = g.utility(z);
            let max = u[1].max(u[2]).max(u[3]);
            // Winner takes the pot minus own contribution: in {2-1, 3-1,
            // 2-2=2, ... } always positive except when everyone folds to
            // the bettor who only recovers the antes.
            assert!(max > 0.0);
        }
    }
}
