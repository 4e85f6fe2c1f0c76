use serde::{Deserialize, Serialize};

use super::game::GridConfig;
use super::SessionError;
use crate::classifier::{ModelConfig, DEFAULT_LAMBDA, DEFAULT_M, DEFAULT_THRESHOLD};
use crate::gesture::Gesture;
use crate::signal::{samples_for, STEP_SECONDS, WINDOW_SECONDS};

#[derive(
    Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize, clap::ValueEnum,
)]
#[serde(rename_all = "lowercase")]
pub enum FeedbackCondition {
    /// No live-feedback block.
    Control,
    /// Smoothed probabilities shown as they are.
    #[default]
    Veridical,
    /// Smoothed probabilities flattened by the modification exponent.
    Modified,
}

impl FeedbackCondition {
    pub fn name(self) -> &'static str {
        match self {
            FeedbackCondition::Control => "control",
            FeedbackCondition::Veridical => "veridical",
            FeedbackCondition::Modified => "modified",
        }
    }
}

/// Epoch durations in seconds.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct TrialTiming {
    pub prompt_s: f64,
    pub production_s: f64,
    /// Production epoch of the live-feedback block.
    pub live_production_s: f64,
    pub recovery_s: f64,
    /// Feature window, taken from the end of production.
    pub window_s: f64,
    pub step_s: f64,
}

impl Default for TrialTiming {
    fn default() -> Self {
        TrialTiming {
            prompt_s: 3.0,
            production_s: 2.0,
            live_production_s: 30.0,
            recovery_s: 3.0,
            window_s: WINDOW_SECONDS,
            step_s: STEP_SECONDS,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct PhaseSamples {
    pub prompt: usize,
    pub production: usize,
    pub recovery: usize,
}

impl PhaseSamples {
    pub fn total(&self) -> usize {
        self.prompt + self.production + self.recovery
    }

    pub fn get(&self, phase: super::Phase) -> usize {
        match phase {
            super::Phase::Prompt => self.prompt,
            super::Phase::Production => self.production,
            super::Phase::Recovery => self.recovery,
        }
    }

    /// Trial-relative feature window `[start, end)`: the last `window`
    /// samples of production.
    pub fn extraction(&self, window: usize) -> (usize, usize) {
        let end = self.prompt + self.production;
        (end - window, end)
    }
}

impl TrialTiming {
    pub fn samples(&self, block: u8, sample_rate: f64) -> PhaseSamples {
        let production = if block == 3 {
            self.live_production_s
        } else {
            self.production_s
        };
        PhaseSamples {
            prompt: samples_for(self.prompt_s, sample_rate),
            production: samples_for(production, sample_rate),
            recovery: samples_for(self.recovery_s, sample_rate),
        }
    }

    pub fn window(&self, sample_rate: f64) -> usize {
        samples_for(self.window_s, sample_rate)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SessionConfig {
    pub condition: FeedbackCondition,
    /// Modification exponent; only meaningful for `Modified`.
    pub m: f64,
    pub lambda: f64,
    pub threshold: f64,
    pub timing: TrialTiming,
    pub grid: GridConfig,
    /// Seeds game generation.
    pub seed: u64,
    pub model: ModelConfig,
    pub block1_repetitions: usize,
    pub block1_rest: usize,
    pub block2_games: usize,
    pub block3_order: Vec<Gesture>,
    pub block4_games: usize,
    /// Safety cap on trials per free game.
    pub block4_trial_cap: usize,
}

impl Default for SessionConfig {
    fn default() -> Self {
        SessionConfig {
            condition: FeedbackCondition::default(),
            m: DEFAULT_M,
            lambda: DEFAULT_LAMBDA,
            threshold: DEFAULT_THRESHOLD,
            timing: TrialTiming::default(),
            grid: GridConfig::default(),
            seed: 0,
            model: ModelConfig::default(),
            block1_repetitions: 5,
            block1_rest: 8,
            block2_games: 4,
            block3_order: Gesture::ACTIVE.to_vec(),
            block4_games: 12,
            block4_trial_cap: 40,
        }
    }
}

impl SessionConfig {
    pub fn with_condition(condition: FeedbackCondition) -> Self {
        SessionConfig {
            condition,
            ..SessionConfig::default()
        }
    }

    pub fn validate(&self) -> Result<(), SessionError> {
        let bad = |m: String| Err(SessionError::Config(m));
        if !(self.m > 0.0) || !self.m.is_finite() {
            return bad(format!("m = {} must be positive", self.m));
        }
        if !(0.0..1.0).contains(&self.lambda) {
            return bad(format!("lambda = {} must lie in [0, 1)", self.lambda));
        }
        if !(0.0..1.0).contains(&self.threshold) {
            return bad(format!("threshold = {} must lie in [0, 1)", self.threshold));
        }
        let t = &self.timing;
        if [
            t.prompt_s,
            t.production_s,
            t.live_production_s,
            t.recovery_s,
            t.window_s,
            t.step_s,
        ]
        .iter()
        .any(|v| !(*v > 0.0))
        {
            return bad("all epoch durations must be positive".into());
        }
        if t.window_s > t.production_s || t.window_s > t.live_production_s {
            return bad("feature window longer than the production epoch".into());
        }
        if self.block3_order.iter().any(|g| !g.is_active()) {
            return bad("live-feedback order may only contain active gestures".into());
        }
        self.grid.validate()?;
        Ok(())
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }

    pub fn from_toml(text: &str) -> Result<Self, SessionError> {
        let cfg: SessionConfig =
            toml::from_str(text).map_err(|e| SessionError::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::session::Phase;

    #[test]
    fn default_phase_arithmetic() {
        let s = TrialTiming::default().samples(1, 1926.0);
        assert_eq!((s.prompt, s.production, s.recovery), (5778, 3852, 5778));
        assert_eq!(s.total(), 15408);
        assert_eq!(s.extraction(963), (8667, 9630));
        assert_eq!(TrialTiming::default().samples(3, 1926.0).production, 57780);
        assert_eq!(s.get(Phase::Recovery), 5778);
    }

    #[test]
    fn toml_round_trip() {
        let mut cfg = SessionConfig::with_condition(FeedbackCondition::Modified);
        cfg.seed = 42;
        cfg.m = 0.5;
        let back = SessionConfig::from_toml(&cfg.to_toml()).unwrap();
        assert_eq!(back, cfg);
        let partial = SessionConfig::from_toml("condition = \"control\"\n").unwrap();
        assert_eq!(partial.condition, FeedbackCondition::Control);
        assert_eq!(partial.block4_games, 12);
    }

    #[test]
    fn invalid_values_rejected() {
        for text in [
            "lambda = 1.0",
            "m = 0.0",
            "threshold = -0.1",
            "block3_order = [\"Rest\"]",
        ] {
            assert!(SessionConfig::from_toml(text).is_err(), "{text}");
        }
    }
}
