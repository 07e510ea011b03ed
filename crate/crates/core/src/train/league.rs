use super::rollout::EpisodeStat;
use crate::nn::PolicyParams;
use std::collections::VecDeque;

/// Two-team self-play with pausing: only `active` trains, the other team
/// plays from its frozen snapshot.
#[derive(Debug, Clone, PartialEq)]
pub struct LeagueState {
    pub active: usize,
    /// Snapshot taken when a team was paused.
    pub frozen: Vec<Option<PolicyParams>>,
    /// Recent episode wins per team, newest last.
    pub windows: Vec<VecDeque<bool>>,
    pub threshold: f64,
    pub window: usize,
    pub switches: usize,
}

impl LeagueState {
    pub fn new(n_teams: usize, threshold: f64, window: usize) -> Self {
        Self {
            active: 0,
            frozen: vec![None; n_teams],
            windows: vec![VecDeque::with_capacity(window); n_teams],
            threshold,
            window,
            switches: 0,
        }
    }

    pub fn record(&mut self, episode: &EpisodeStat) {
        for (team, w) in self.windows.iter_mut().enumerate() {
            if w.len() == self.window {
                w.pop_front();
            }
            w.push_back(episode.winner == Some(team));
        }
    }

    /// Win rate over the window; `None` until the window is full.
    pub fn success_rate(&self, team: usize) -> Option<f64> {
        let w = &self.windows[team];
        (w.len() == self.window).then(|| w.iter().filter(|x| **x).count() as f64 / w.len() as f64)
    }

    pub fn training_flags(&self) -> Vec<bool> {
        (0..self.frozen.len()).map(|t| t == self.active).collect()
    }
}

/// Pauses the active team once its windowed win rate reaches the threshold,
/// storing `active_params` as its snapshot and handing training to the next
/// team.
pub fn selfplay_step(mut league: LeagueState, active_params: &PolicyParams) -> LeagueState {
    let crossed = league.success_rate(league.active).is_some_and(|r| r >= league.threshold);
    if crossed {
        league.frozen[league.active] = Some(active_params.clone());
        league.active = (league.active + 1) % league.frozen.len();
        league.windows.iter_mut().for_each(VecDeque::clear);
        league.switches += 1;
    }
    league
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::nn::NetShape;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn params() -> PolicyParams {
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        PolicyParams::new(NetShape { obs_len: 2, joint_len: 2, hidden: 2, layers: 1 }, &mut rng)
    }

    fn feed(league: &mut LeagueState, wins: usize, total: usize, team: usize) {
        for i in 0..total {
            league.record(&EpisodeStat {
                returns: vec![0.0, 0.0],
                winner: (i < wins).then_some(team),
                steps: 1,
            });
        }
    }

    #[test]
    fn below_threshold_is_unchanged() {
        let mut l = LeagueState::new(2, 0.55, 100);
        feed(&mut l, 40, 100, 0);
        let after = selfplay_step(l.clone(), &params());
        assert_eq!(after, l);
    }

    #[test]
    fn crossing_swaps_roles_and_snapshots() {
        let mut l = LeagueState::new(2, 0.55, 100);
        feed(&mut l, 60, 100, 0);
        let p = params();
        let after = selfplay_step(l, &p);
        assert_eq!(after.active, 1);
        assert_eq!(after.frozen[0].as_ref(), Some(&p));
        assert_eq!(after.training_flags(), vec![false, true]);
    }

    #[test]
    fn scripted_crossings_alternate() {
        let mut l = LeagueState::new(2, 0.55, 10);
        let script = [(3, false), (6, true), (5, false), (9, true), (0, false), (10, true)];
        let mut expected_active = 0;
        for (wins, crosses) in script {
            let active = l.active;
            feed(&mut l, wins, 10, active);
            l = selfplay_step(l, &params());
            if crosses {
                expected_active = 1 - expected_active;
            }
            assert_eq!(l.active, expected_active);
            assert_eq!(l.training_flags().iter().filter(|x| **x).count(), 1);
        }
        assert_eq!(l.switches, 3);
    }
}
