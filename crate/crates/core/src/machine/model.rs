use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{Architecture, ParameterTensor, TrajectoryResult};
use crate::error::{Error, Result};

pub const MODEL_FORMAT_VERSION: u32 = 1;

/// Provenance stored alongside trained weights.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TrainingMeta {
    pub epochs: usize,
    pub reward_kind: String,
    pub instance_family: String,
    pub seed: u64,
}

/// On-disk trained model: architecture, row-major `Θ` and training metadata.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelFile {
    pub format_version: u32,
    pub arch: Architecture,
    pub theta: Vec<f64>,
    pub training_meta: TrainingMeta,
}

impl ModelFile {
    pub fn new(params: &ParameterTensor, training_meta: TrainingMeta) -> Self {
        ModelFile {
            format_version: MODEL_FORMAT_VERSION,
            arch: *params.arch(),
            theta: params.matrix().to_vec(),
            training_meta,
        }
    }

    pub fn params(&self) -> Result<ParameterTensor> {
        if self.format_version != MODEL_FORMAT_VERSION {
            return Err(Error::FormatVersion { found: self.format_version, expected: MODEL_FORMAT_VERSION });
        }
        ParameterTensor::from_matrix(self.arch, self.theta.clone())
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let model: ModelFile = serde_json::from_str(text)?;
        model.params()?;
        Ok(model)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        std::fs::write(path, self.to_json()?)?;
        Ok(())
    }
}

/// Writes `step,variable_index,x,h` rows from a traced run.
pub fn write_trace_csv<W: Write>(result: &TrajectoryResult, out: W) -> Result<()> {
    let (Some(xs), Some(hs)) = (&result.x_trace, &result.h_trace) else {
        return Err(Error::InvalidParameter("trajectory was run without tracing".into()));
    };
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["step", "variable_index", "x", "h"])?;
    for (step, (x, h)) in xs.iter().zip(hs).enumerate() {
        for (i, (xi, hi)) in x.iter().zip(h).enumerate() {
            w.serialize((step, i, xi, hi))?;
        }
    }
    w.flush()?;
    Ok(())
}

/// Column names of the unrolled weights `θ(t)`.
pub fn weight_columns(arch: &Architecture) -> Vec<String> {
    let mut cols = vec!["w0".to_string()];
    if arch.is_single_layer() {
        cols.extend((0..arch.t_c).map(|s| format!("w2_{s}")));
    } else {
        cols.extend((0..arch.d).map(|k| format!("w1_{k}")));
        for k in 0..arch.d {
            cols.extend((0..arch.t_c).map(|s| format!("w2_{k}_{s}")));
        }
    }
    cols
}

/// Writes one row of unrolled weights per step `t = 0..t_total`.
pub fn write_weight_snapshot_csv<W: Write>(params: &ParameterTensor, t_total: usize, out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(weight_columns(params.arch()))?;
    for t in 0..t_total {
        w.serialize(params.weights_at(t, t_total)?.flatten())?;
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instance::gen_sk;
    use crate::machine::{run_trajectory, Variant};

    fn sample_model() -> ModelFile {
        let arch = Architecture::new(3, 2, 2, Variant::Discrete).unwrap();
        let flat: Vec<f64> = (0..arch.param_count()).map(|i| (i as f64 * 0.37).sin() / 3.0).collect();
        let p = ParameterTensor::from_flat(arch, &flat).unwrap();
        ModelFile::new(
            &p,
            TrainingMeta { epochs: 4, reward_kind: "success".into(), instance_family: "sk".into(), seed: 11 },
        )
    }

    #[test]
    fn json_round_trip() {
        let m = sample_model();
        let back = ModelFile::from_json(&m.to_json().unwrap()).unwrap();
        assert_eq!(back, m);
        assert_eq!(back.params().unwrap().to_flat(), m.params().unwrap().to_flat());
    }

    #[test]
    fn rejects_unknown_fields_and_versions() {
        let m = sample_model();
        let mut v: serde_json::Value = serde_json::from_str(&m.to_json().unwrap()).unwrap();
        v["extra"] = serde_json::json!(1);
        assert!(ModelFile::from_json(&v.to_string()).is_err());
        v.as_object_mut().unwrap().remove("extra");
        v["format_version"] = serde_json::json!(9);
        assert!(matches!(ModelFile::from_json(&v.to_string()), Err(Error::FormatVersion { .. })));
        v["format_version"] = serde_json::json!(1);
        v["theta"] = serde_json::json!([1.0]);
        assert!(ModelFile::from_json(&v.to_string()).is_err());
    }

    #[test]
    fn trace_csv_shape() {
        let inst = gen_sk(4, 0).unwrap();
        let p = sample_model().params().unwrap();
        let r = run_trajectory(&inst, &p, 5, 2, true).unwrap();
        let mut buf = Vec::new();
        write_trace_csv(&r, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], "step,variable_index,x,h");
        assert_eq!(lines.len(), 1 + 5 * 4);
        let untraced = run_trajectory(&inst, &p, 5, 2, false).unwrap();
        assert!(write_trace_csv(&untraced, Vec::new()).is_err());
    }

    #[test]
    fn single_layer_snapshot_has_one_plus_t_c_columns() {
        let arch = Architecture::new(6, 0, 2, Variant::Continuous).unwrap();
        let p = ParameterTensor::zeros(arch);
        let mut buf = Vec::new();
        write_weight_snapshot_csv(&p, 10, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines.len(), 11);
        assert!(lines.iter().all(|l| l.split(',').count() == 7));
    }
}
