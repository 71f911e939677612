use serde::{Deserialize, Serialize};

use crate::pipeline::{DecomposeParams, Decomposition, PlannerKind};
use crate::planner::Exploration;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ParamsEcho {
    pub threshold: f64,
    pub m: usize,
    pub iterations: usize,
    pub depth: usize,
    pub k: f64,
    pub seed: u64,
    pub pca: bool,
    pub merge: bool,
    pub planner: PlannerKind,
    pub separate_shells: bool,
    pub exploration: Option<f64>,
    pub max_components: usize,
}

impl From<&DecomposeParams> for ParamsEcho {
    fn from(p: &DecomposeParams) -> Self {
        ParamsEcho {
            threshold: p.epsilon,
            m: p.planner.m,
            iterations: p.planner.t,
            depth: p.planner.d,
            k: p.concavity.k,
            seed: p.planner.seed,
            pca: p.planner.use_pca,
            merge: p.merge,
            planner: p.planner_kind,
            separate_shells: p.planner.separate_shells,
            exploration: match p.planner.exploration {
                Exploration::Fixed(c) => Some(c),
                Exploration::Adaptive => None,
            },
            max_components: p.max_components,
        }
    }
}

/// Concavities are in normalized units (largest input extent = 2); volume
/// is the hull volume in input units.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PartReport {
    pub hull_vertices: usize,
    pub volume: f64,
    pub hb: f64,
    pub rv: f64,
    pub fast: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub hi_oracle: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub schema: u32,
    pub input: String,
    pub vertices: usize,
    pub triangles: usize,
    pub params: ParamsEcho,
    pub components: usize,
    pub parts: Vec<PartReport>,
    pub score: Option<f64>,
    pub cuts: usize,
    pub merges: usize,
    pub uncuttable: usize,
    pub capped: bool,
    pub seed: u64,
    /// Seconds; the only field that varies between identical runs.
    pub wall_time_s: f64,
}

impl RunReport {
    pub fn new(
        input: &str,
        mesh: &crate::mesh::SolidMesh,
        params: &DecomposeParams,
        d: &Decomposition,
        score: Option<f64>,
    ) -> Self {
        RunReport {
            schema: SCHEMA_VERSION,
            input: input.to_string(),
            vertices: mesh.vertices().len(),
            triangles: mesh.triangles().len(),
            params: params.into(),
            components: d.parts.len(),
            parts: d
                .parts
                .iter()
                .map(|p| PartReport {
                    hull_vertices: p.hull.vertices().len(),
                    volume: p.hull.signed_volume(),
                    hb: p.report.hb,
                    rv: p.report.rv,
                    fast: p.report.fast,
                    hi_oracle: p.report.hi_oracle,
                })
                .collect(),
            score,
            cuts: d.stats.cuts,
            merges: d.stats.merges,
            uncuttable: d.stats.uncuttable,
            capped: d.stats.capped,
            seed: params.planner.seed,
            wall_time_s: d.stats.wall_time_s,
        }
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }
}
