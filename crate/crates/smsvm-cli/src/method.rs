//! Canonical method and schedule names shared by `train` and the bench
//! config, so a model file, a CLI flag, and a benchmark row all spell a
//! method the same way.

use clap::ValueEnum;
use smsvm::{BaselineMethod, StepSchedule};

/// Every trainable method: the two active-set Newton variants plus the
/// exact-hinge baselines.
#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Method {
    /// Active-set Newton with the l2 penalty only (mu fixed at 0).
    #[value(name = "smsvm-l2")]
    SmsvmL2,
    /// Active-set Newton with both l1 and l2 penalties.
    #[value(name = "smsvm-l1l2")]
    SmsvmL1l2,
    /// Full-data subgradient descent on the exact hinge.
    #[value(name = "subgrad")]
    Subgrad,
    /// Mini-batch stochastic subgradient descent on the exact hinge.
    #[value(name = "sgd")]
    Sgd,
    /// Polak-Ribiere+ CG on the plain mean hinge (no l2 term).
    #[value(name = "cg")]
    Cg,
    /// Polak-Ribiere+ CG on the l2-regularized hinge.
    #[value(name = "cg_l2")]
    CgL2,
}

impl Method {
    pub const ALL: [Method; 6] = [
        Method::SmsvmL2,
        Method::SmsvmL1l2,
        Method::Subgrad,
        Method::Sgd,
        Method::Cg,
        Method::CgL2,
    ];

    /// Stable name used in model files, configs, and benchmark tables.
    pub fn name(self) -> &'static str {
        match self {
            Method::SmsvmL2 => "smsvm-l2",
            Method::SmsvmL1l2 => "smsvm-l1l2",
            Method::Subgrad => "subgrad",
            Method::Sgd => "sgd",
            Method::Cg => "cg",
            Method::CgL2 => "cg_l2",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        Method::ALL.into_iter().find(|m| m.name() == name)
    }

    /// The baseline this method maps to; `None` for the Newton variants.
    pub fn baseline(self) -> Option<BaselineMethod> {
        match self {
            Method::SmsvmL2 | Method::SmsvmL1l2 => None,
            Method::Subgrad => Some(BaselineMethod::Subgrad),
            Method::Sgd => Some(BaselineMethod::Sgd),
            Method::Cg => Some(BaselineMethod::Cg),
            Method::CgL2 => Some(BaselineMethod::CgL2),
        }
    }

    pub fn is_newton(self) -> bool {
        self.baseline().is_none()
    }
}

/// Step-size schedule selector for the (stochastic) subgradient baselines.
#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ScheduleKind {
    /// `eta_t = eta0` for every step.
    Constant,
    /// `eta_t = eta0 / (1 + t / t0)`.
    InvDecay,
    /// `eta_t = 1 / (lambda (t + 1))`; requires `lambda > 0`.
    InvLambdaT,
}

impl ScheduleKind {
    pub fn name(self) -> &'static str {
        match self {
            ScheduleKind::Constant => "constant",
            ScheduleKind::InvDecay => "inv-decay",
            ScheduleKind::InvLambdaT => "inv-lambda-t",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        [ScheduleKind::Constant, ScheduleKind::InvDecay, ScheduleKind::InvLambdaT]
            .into_iter()
            .find(|k| k.name() == name)
    }

    pub fn to_schedule(self, eta0: f64, t0: f64) -> StepSchedule<f64> {
        match self {
            ScheduleKind::Constant => StepSchedule::Constant(eta0),
            ScheduleKind::InvDecay => StepSchedule::InvDecay { eta0, t0 },
            ScheduleKind::InvLambdaT => StepSchedule::InvLambdaT,
        }
    }
}
