use clap::ValueEnum;
use incpath_core::cyclestats::{Precision, RATIONAL_CAP};
use incpath_core::kgreedy::TerminationMode;
use incpath_core::LabelModel;
use serde::{Deserialize, Serialize};

use crate::HarnessError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    /// Greedy path length over random orderings.
    GreedySim,
    /// k-greedy path length against the cycle-statistics prediction.
    KgreedySim,
    /// Pedestrian and refusal processes on random and matching orderings.
    WalksDemo,
    /// alpha_k table.
    AlphaTable,
    /// Chinese restaurant process against the exact longest-cycle law.
    CyclesMc,
    /// Probability that an increasing Hamiltonian path exists.
    Hamprob,
    /// Exact or sampled moments of the Hamiltonian path count.
    Moments,
    /// Profile census over all ordered pairs of Hamiltonian sequences.
    Census,
    /// The three split sums for a given n.
    Bounds,
    /// Partial sums of the limiting constant.
    ConstantC,
    /// Greedy, pedestrian and exact results on the matching ordering.
    Worstcase,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Self::GreedySim => "greedy-sim",
            Self::KgreedySim => "kgreedy-sim",
            Self::WalksDemo => "walks-demo",
            Self::AlphaTable => "alpha-table",
            Self::CyclesMc => "cycles-mc",
            Self::Hamprob => "hamprob",
            Self::Moments => "moments",
            Self::Census => "census",
            Self::Bounds => "bounds",
            Self::ConstantC => "constant-c",
            Self::Worstcase => "worstcase",
        }
    }
}

/// Everything that determines a report. Output paths and the worker count
/// are deliberately absent: they never change the results.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub command: Command,
    pub n: Option<usize>,
    pub k: Option<usize>,
    pub trials: Option<u64>,
    pub seed: u64,
    pub model: LabelModel,
    pub mode: TerminationMode,
    pub precision: Option<Precision>,
    pub c_max: Option<usize>,
    pub emit_raw: bool,
}

pub const DEFAULT_SEED: u64 = 20_240_601;

impl ExperimentConfig {
    pub fn new(command: Command) -> Self {
        Self {
            command,
            n: None,
            k: None,
            trials: None,
            seed: DEFAULT_SEED,
            model: LabelModel::Real,
            mode: TerminationMode::Exhaust,
            precision: None,
            c_max: None,
            emit_raw: false,
        }
    }

    pub fn n(mut self, n: usize) -> Self {
        self.n = Some(n);
        self
    }

    pub fn k(mut self, k: usize) -> Self {
        self.k = Some(k);
        self
    }

    pub fn trials(mut self, trials: u64) -> Self {
        self.trials = Some(trials);
        self
    }

    pub fn seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    /// Fills per-command defaults and checks ranges.
    pub fn resolve(mut self) -> Result<Self, HarnessError> {
        use Command::*;
        let (n, k, trials) = match self.command {
            GreedySim => (Some(2000), None, Some(200)),
            KgreedySim => (Some(2000), Some(10), Some(100)),
            WalksDemo => (Some(30), None, Some(100)),
            AlphaTable => (None, Some(100), None),
            CyclesMc => (None, Some(20), Some(100_000)),
            Hamprob => (Some(12), None, Some(2000)),
            Moments => (Some(4), None, None),
            Census => (Some(5), None, None),
            Bounds => (Some(100), None, None),
            ConstantC => (None, None, None),
            Worstcase => (Some(8), None, None),
        };
        self.n = self.n.or(n);
        self.k = self.k.or(k);
        self.trials = self.trials.or(trials);
        if self.command == ConstantC {
            self.c_max = self.c_max.or(Some(80));
        }
        if matches!(self.command, AlphaTable | CyclesMc) && self.precision.is_none() {
            let k = self.k.unwrap_or(1);
            self.precision = Some(if k <= RATIONAL_CAP { Precision::Rational } else { Precision::Float });
        }
        if self.trials == Some(0) {
            return Err(HarnessError::Usage("--trials must be at least 1".into()));
        }
        if self.k == Some(0) {
            return Err(HarnessError::Usage("--k must be at least 1".into()));
        }
        if matches!(self.n, Some(n) if n < 2) {
            return Err(HarnessError::Usage("--n must be at least 2".into()));
        }
        Ok(self)
    }
}
