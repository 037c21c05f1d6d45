//! Bundled sweep configurations for the four standard comparison plots.

use crate::config::{self, Config};

pub const NAMES: [&str; 4] = ["fig4a", "fig4b", "fig5", "fig6"];

/// Exponential services, drop probability of source 1 varies (s1 = 2).
pub const FIG4A: &str = r#"
[scenario]
mean_service_1 = 2.0
drop_prob_1 = 0.0
weight_1 = 0.2
mean_service_2 = 3.0
drop_prob_2 = 0.9
weight_2 = 0.8

[service]
kind_1 = "exponential"
kind_2 = "exponential"

[sweep]
varying = "drop_prob_1"
grid = [0.0, 0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9]
methods = ["optimal", "pgaw", "round_robin", "insertion_search"]
alpha = 200

[sim]
slots = 200000
warmup_cycles = 1000
batches = 20
seed = 1
pgaw_grid_step = 0.05
"#;

/// Exponential services, mean service time of source 1 varies (p = 0.8).
pub const FIG4B: &str = r#"
[scenario]
mean_service_1 = 2.0
drop_prob_1 = 0.8
weight_1 = 0.2
mean_service_2 = 3.0
drop_prob_2 = 0.9
weight_2 = 0.8

[service]
kind_1 = "exponential"
kind_2 = "exponential"

[sweep]
varying = "mean_service_1"
grid = [1.0, 2.0, 3.0, 4.0, 5.0, 6.0, 7.0, 8.0, 9.0, 10.0]
methods = ["optimal", "pgaw", "round_robin", "insertion_search"]
alpha = 200

[sim]
slots = 200000
warmup_cycles = 1000
batches = 20
seed = 1
pgaw_grid_step = 0.05
"#;

/// Identical deterministic services, drop probability of source 1 varies.
pub const FIG5: &str = r#"
[scenario]
mean_service_1 = 1.0
drop_prob_1 = 0.0
weight_1 = 0.5
mean_service_2 = 1.0
drop_prob_2 = 0.9
weight_2 = 0.5

[sweep]
varying = "drop_prob_1"
grid = [0.0, 0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9]
methods = ["optimal", "pgaw", "round_robin", "insertion_search"]
alpha = 200

[sim]
slots = 200000
warmup_cycles = 1000
batches = 20
seed = 1
pgaw_grid_step = 0.05
"#;

/// Identical deterministic services, weight of source 1 varies.
pub const FIG6: &str = r#"
[scenario]
mean_service_1 = 1.0
drop_prob_1 = 0.9
weight_1 = 0.5
mean_service_2 = 1.0
drop_prob_2 = 0.9
weight_2 = 0.5

[sweep]
varying = "weight_1"
grid = [0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9]
methods = ["optimal", "pgaw", "round_robin", "insertion_search"]
alpha = 200

[sim]
slots = 200000
warmup_cycles = 1000
batches = 20
seed = 1
pgaw_grid_step = 0.05
"#;

pub fn text(name: &str) -> Option<&'static str> {
    match name {
        "fig4a" => Some(FIG4A),
        "fig4b" => Some(FIG4B),
        "fig5" => Some(FIG5),
        "fig6" => Some(FIG6),
        _ => None,
    }
}

pub fn load(name: &str) -> Option<Config> {
    text(name).map(|t| config::parse(t).expect("bundled presets parse"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::Param;
    use cyclic_aoi_core::ServiceKind;

    #[test]
    fn presets_match_captions() {
        let f4a = load("fig4a").unwrap();
        let s = f4a.sweep.as_ref().unwrap();
        assert_eq!(s.varying, Param::DropProb1);
        assert_eq!(f4a.base.mean, [2.0, 3.0]);
        assert_eq!(f4a.base.weight_1, 0.2);
        assert_eq!(f4a.base.drop[1], 0.9);
        assert_eq!(f4a.base.kind, [ServiceKind::Exponential; 2]);

        let f4b = load("fig4b").unwrap();
        assert_eq!(f4b.sweep.as_ref().unwrap().varying, Param::MeanService1);
        assert_eq!(f4b.base.drop, [0.8, 0.9]);
        assert_eq!(f4b.base.mean[1], 3.0);

        let f5 = load("fig5").unwrap();
        assert_eq!(f5.base.mean, [1.0, 1.0]);
        assert_eq!(f5.base.weight_1, 0.5);
        assert_eq!(f5.base.drop[1], 0.9);
        assert_eq!(f5.base.kind, [ServiceKind::Deterministic; 2]);

        let f6 = load("fig6").unwrap();
        assert_eq!(f6.sweep.as_ref().unwrap().varying, Param::Weight1);
        assert_eq!(f6.base.drop, [0.9, 0.9]);
        assert_eq!(f6.base.mean, [1.0, 1.0]);
    }

    #[test]
    fn unknown_preset() {
        assert!(load("fig7").is_none());
        for n in NAMES {
            assert!(load(n).is_some());
        }
    }
}
