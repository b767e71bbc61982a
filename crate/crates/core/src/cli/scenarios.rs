//! Built-in scenarios.

use super::config::{
    ConvergeSection, DeltaSection, DiscretizeSection, LeadsSection, MaterialSection, PieceSection, ScenarioConfig,
    SweepSection,
};

/// Barrier height shared by the double barrier and the parabola (eV).
pub const BARRIER_HEIGHT: f64 = 0.956;
/// Half-width of the parabolic piece (nm).
pub const PARABOLA_HALF_WIDTH: f64 = 15.0;

pub const NAMES: [&str; 3] = ["fig1", "fig2", "parabolic-well"];

fn constant(x_lo: f64, x_hi: f64, u: f64) -> PieceSection {
    PieceSection {
        x_lo,
        x_hi,
        u: Some(u),
        kind: None,
        a: None,
        x0: None,
    }
}

fn parabola() -> PieceSection {
    let x0 = PARABOLA_HALF_WIDTH;
    PieceSection {
        x_lo: -x0,
        x_hi: x0,
        u: None,
        kind: Some("parabola".into()),
        a: Some(BARRIER_HEIGHT / (x0 * x0)),
        x0: Some(0.0),
    }
}

fn material() -> MaterialSection {
    MaterialSection { m_rel: 0.1 }
}

/// Two 30 nm barriers of 0.956 eV, 100 nm apart, with a delta of strength
/// `alpha` (eV nm) midway when `alpha != 0`.
pub fn fig1(alpha: f64) -> ScenarioConfig {
    let (b, w) = (30.0, 50.0);
    let pieces = vec![
        constant(-w - b, -w, BARRIER_HEIGHT),
        constant(-w, w, 0.0),
        constant(w, w + b, BARRIER_HEIGHT),
    ];
    let deltas = if alpha != 0.0 {
        vec![DeltaSection { x: 0.0, g: alpha }]
    } else {
        vec![]
    };
    let mut config = ScenarioConfig::new(
        material(),
        LeadsSection {
            u_left: 0.0,
            u_right: 0.0,
        },
        pieces,
        deltas,
    );
    config.sweep = Some(SweepSection {
        e_min: 0.001,
        e_max: 1.5,
        points: 30_000,
    });
    config.discretize = Some(DiscretizeSection {
        n: 1,
        strategy: "equal-width".into(),
        e_ref: None,
        fraction: None,
    });
    config
}

/// Parabolic barrier `a x²` on `[-15, 15]` nm with `a·15² = 0.956` eV.
pub fn fig2() -> ScenarioConfig {
    let mut config = ScenarioConfig::new(
        material(),
        LeadsSection {
            u_left: 0.0,
            u_right: 0.0,
        },
        vec![parabola()],
        vec![],
    );
    config.sweep = Some(SweepSection {
        e_min: 0.05,
        e_max: 1.5,
        points: 100,
    });
    config.discretize = Some(DiscretizeSection {
        n: 64,
        strategy: "equal-width".into(),
        e_ref: None,
        fraction: None,
    });
    config.converge = Some(ConvergeSection {
        n0: 4,
        epsilon: 1e-6,
        n_max: 1024,
    });
    config
}

/// The same parabola used as a well: leads at `a·15²`.
pub fn parabolic_well() -> ScenarioConfig {
    let mut config = ScenarioConfig::new(
        material(),
        LeadsSection {
            u_left: BARRIER_HEIGHT,
            u_right: BARRIER_HEIGHT,
        },
        vec![parabola()],
        vec![],
    );
    config.sweep = Some(SweepSection {
        e_min: 0.96,
        e_max: 2.0,
        points: 100,
    });
    config.discretize = Some(DiscretizeSection {
        n: 256,
        strategy: "equal-width".into(),
        e_ref: None,
        fraction: None,
    });
    config.converge = Some(ConvergeSection {
        n0: 16,
        epsilon: 1e-6,
        n_max: 4096,
    });
    config
}

/// Looks up a scenario by name; `alpha` only affects `fig1`.
pub fn by_name(name: &str, alpha: f64) -> Option<ScenarioConfig> {
    match name {
        "fig1" => Some(fig1(alpha)),
        "fig2" => Some(fig2()),
        "parabolic-well" => Some(parabolic_well()),
        _ => None,
    }
}
