//! Built-in systems. Each preset is a complete config document; user files
//! that name a preset override it key by key.

use serde::Serialize;

#[derive(Clone, Copy, Debug, Serialize)]
pub struct Preset {
    pub name: &'static str,
    pub form: &'static str,
    pub provenance: &'static str,
    #[serde(skip)]
    pub config: &'static str,
}

pub const PRESETS: &[Preset] = &[
    Preset {
        name: "pendulum-linearized",
        form: "x' = A x, A = [[0, 1], [-1, 0]], x(0) = (1, 0)",
        provenance: "small-angle pendulum; one period sampled at 30 times, the closed orbit should read as a loop",
        config: PENDULUM,
    },
    Preset {
        name: "harmonic-oscillator",
        form: "x' = A x, A = [[0, 1], [-4, 0]], x(0) = (1, 0)",
        provenance: "oscillator with ω = 2; elliptic orbit, unequal axes",
        config: HARMONIC,
    },
    Preset {
        name: "coupled-springs",
        form: "q'' = -K q, K = [[2, -1], [-1, 2]], state (q1, q2, q1', q2'), x(0) = (1, 1, 0, 0)",
        provenance: "two masses and three unit springs, started in the in-phase normal mode (ω = 1)",
        config: COUPLED,
    },
    Preset {
        name: "decaying-spiral",
        form: "x' = A x, A = [[-0.1, 1], [-1, -0.1]], x(0) = (1, 0)",
        provenance: "one turn of a damped rotation under the euclidean metric; the spiral never closes up (under cosine dissimilarity the norm is lost and it reads as a loop)",
        config: SPIRAL,
    },
    Preset {
        name: "two-tori",
        form: "x' = A x, A = diag(R(1), R(√2)), R(w) = [[0, w], [-w, 0]], x(0) = (1, 0, 1, 0)",
        provenance: "incommensurate frequencies on a 2-torus in R⁴; Betti numbers checked against the exact oracle",
        config: TORUS,
    },
    Preset {
        name: "logistic-forced",
        form: "x' = x - x² + 0.3 u, u' = v, v' = -u, (x, u, v)(0) = (0.2, 1, 0)",
        provenance: "nonlinear polynomial fixture: logistic growth driven by a harmonic input, integrated with Euler",
        config: LOGISTIC,
    },
];

pub fn find(name: &str) -> Option<&'static Preset> {
    PRESETS.iter().find(|p| p.name == name)
}

const PENDULUM: &str = r#"
[system]
kind = "linear"
a = [[0.0, 1.0], [-1.0, 0.0]]
initial_state = [1.0, 0.0]

[solver]
t_end = 6.283185307179586
steps = 300

[sampling]
samples = 30

[sweep]
eps = [0.03, 0.06, 0.1, 0.15, 0.2, 0.25, 0.3]
"#;

const HARMONIC: &str = r#"
[system]
kind = "linear"
a = [[0.0, 1.0], [-4.0, 0.0]]
initial_state = [1.0, 0.0]

[solver]
t_end = 3.141592653589793
steps = 300

[sampling]
samples = 30

[sweep]
eps = [0.1, 0.125, 0.14, 0.175, 0.2, 0.215]
r_max = 2
"#;

const COUPLED: &str = r#"
[system]
kind = "linear"
a = [
    [0.0, 0.0, 1.0, 0.0],
    [0.0, 0.0, 0.0, 1.0],
    [-2.0, 1.0, 0.0, 0.0],
    [1.0, -2.0, 0.0, 0.0],
]
initial_state = [1.0, 1.0, 0.0, 0.0]

[solver]
t_end = 6.283185307179586
steps = 300

[sampling]
samples = 30

[sweep]
eps = [0.03, 0.06, 0.1, 0.15, 0.2, 0.25, 0.3]
"#;

const SPIRAL: &str = r#"
[system]
kind = "linear"
a = [[-0.1, 1.0], [-1.0, -0.1]]
initial_state = [1.0, 0.0]

[solver]
t_end = 6.283185307179586
steps = 400

[sampling]
samples = 30

[sweep]
metric = "euclidean"
eps = [0.2, 0.25, 0.3, 0.35, 0.4, 0.45]
"#;

const TORUS: &str = r#"
[system]
kind = "linear"
a = [
    [0.0, 1.0, 0.0, 0.0],
    [-1.0, 0.0, 0.0, 0.0],
    [0.0, 0.0, 0.0, 1.4142135623730951],
    [0.0, 0.0, -1.4142135623730951, 0.0],
]
initial_state = [1.0, 0.0, 1.0, 0.0]

[solver]
t_end = 300.0
steps = 199

[sampling]
samples = 200

[sweep]
eps = [0.0675, 0.0725, 0.075, 0.085, 0.0875, 0.09]
r_max = 2
"#;

const LOGISTIC: &str = r#"
[system]
kind = "polynomial"
initial_state = [0.2, 1.0, 0.0]
terms = [
    { component = 0, coeff = 1.0, powers = [1, 0, 0] },
    { component = 0, coeff = -1.0, powers = [2, 0, 0] },
    { component = 0, coeff = 0.3, powers = [0, 1, 0] },
    { component = 1, coeff = 1.0, powers = [0, 0, 1] },
    { component = 2, coeff = -1.0, powers = [0, 1, 0] },
]

[solver]
scheme = "euler"
t_end = 18.84955592153876
steps = 3000

[sampling]
samples = 36

[sweep]
eps = [0.11, 0.13, 0.15, 0.18, 0.21, 0.25]
"#;
