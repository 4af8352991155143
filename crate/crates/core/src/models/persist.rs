//! Binary model files.
//!
//! All integers and floats are little-endian:
//!
//! ```text
//! magic        8 bytes   "BOWCLFMD"
//! version      u32       1
//! kind         4 bytes   NBAY | LOGR | LSVM | RIDG | TREE
//! dimension    u64
//! n_hyper      u32
//! n_hyper x    u16 name length, name (UTF-8), f64 value
//! payload_len  u64
//! payload      payload_len bytes, layout depends on kind
//! crc32        u32       over every preceding byte
//! ```

use std::fs;
use std::io::{Read, Write};
use std::path::Path;

use super::{
    DecisionTreeModel, LogisticModel, ModelError, NaiveBayesModel, RidgeModel, SvmModel,
    TrainedModel, TreeNode, TreeParams,
};
use crate::corpus::Label;

pub const MAGIC: &[u8; 8] = b"BOWCLFMD";
pub const FORMAT_VERSION: u32 = 1;

fn tag(model: &TrainedModel) -> &'static [u8; 4] {
    match model {
        TrainedModel::NaiveBayes(_) => b"NBAY",
        TrainedModel::Logistic(_) => b"LOGR",
        TrainedModel::Svm(_) => b"LSVM",
        TrainedModel::Ridge(_) => b"RIDG",
        TrainedModel::Tree(_) => b"TREE",
    }
}

#[derive(Default)]
struct Writer(Vec<u8>);

impl Writer {
    fn u8(&mut self, v: u8) {
        self.0.push(v);
    }
    fn u16(&mut self, v: u16) {
        self.0.extend_from_slice(&v.to_le_bytes());
    }
    fn u32(&mut self, v: u32) {
        self.0.extend_from_slice(&v.to_le_bytes());
    }
    fn u64(&mut self, v: u64) {
        self.0.extend_from_slice(&v.to_le_bytes());
    }
    fn f64(&mut self, v: f64) {
        self.0.extend_from_slice(&v.to_le_bytes());
    }
    fn f64s(&mut self, vs: &[f64]) {
        for &v in vs {
            self.f64(v);
        }
    }
}

struct Reader<'a> {
    buf: &'a [u8],
    pos: usize,
}

impl<'a> Reader<'a> {
    fn take(&mut self, n: usize) -> Result<&'a [u8], ModelError> {
        let end = self
            .pos
            .checked_add(n)
            .filter(|&e| e <= self.buf.len())
            .ok_or(ModelError::Truncated)?;
        let out = &self.buf[self.pos..end];
        self.pos = end;
        Ok(out)
    }
    fn array<const N: usize>(&mut self) -> Result<[u8; N], ModelError> {
        Ok(self.take(N)?.try_into().expect("length checked"))
    }
    fn u8(&mut self) -> Result<u8, ModelError> {
        Ok(self.array::<1>()?[0])
    }
    fn u16(&mut self) -> Result<u16, ModelError> {
        Ok(u16::from_le_bytes(self.array()?))
    }
    fn u32(&mut self) -> Result<u32, ModelError> {
        Ok(u32::from_le_bytes(self.array()?))
    }
    fn u64(&mut self) -> Result<u64, ModelError> {
        Ok(u64::from_le_bytes(self.array()?))
    }
    fn usize(&mut self) -> Result<usize, ModelError> {
        usize::try_from(self.u64()?)
            .map_err(|_| ModelError::Malformed("integer out of range".into()))
    }
    fn f64(&mut self) -> Result<f64, ModelError> {
        Ok(f64::from_le_bytes(self.array()?))
    }
    fn f64s(&mut self, n: usize) -> Result<Vec<f64>, ModelError> {
        // check the length up front so a corrupt count cannot force a huge allocation
        let bytes = self.take(n.checked_mul(8).ok_or(ModelError::Truncated)?)?;
        Ok(bytes
            .chunks_exact(8)
            .map(|c| f64::from_le_bytes(c.try_into().unwrap()))
            .collect())
    }
    fn u64s(&mut self, n: usize) -> Result<Vec<u64>, ModelError> {
        let bytes = self.take(n.checked_mul(8).ok_or(ModelError::Truncated)?)?;
        Ok(bytes
            .chunks_exact(8)
            .map(|c| u64::from_le_bytes(c.try_into().unwrap()))
            .collect())
    }
    fn is_done(&self) -> bool {
        self.pos == self.buf.len()
    }
}

fn hyperparameters(model: &TrainedModel) -> Vec<(&'static str, f64)> {
    match model {
        TrainedModel::NaiveBayes(m) => vec![("alpha", m.alpha)],
        TrainedModel::Logistic(m) => vec![("lambda", m.lambda), ("threshold", m.threshold)],
        TrainedModel::Svm(m) => vec![("C", m.c)],
        TrainedModel::Ridge(m) => vec![("lambda", m.lambda)],
        TrainedModel::Tree(m) => vec![
            ("max_depth", m.params.max_depth as f64),
            ("min_node_size", m.params.min_node_size as f64),
            // 0 encodes "no cap"; a cap of 0 is not a valid setting
            ("feature_cap", m.params.feature_cap.unwrap_or(0) as f64),
        ],
    }
}

fn write_payload(model: &TrainedModel, w: &mut Writer) {
    match model {
        TrainedModel::NaiveBayes(m) => {
            w.u64(m.docs[0]);
            w.u64(m.docs[1]);
            for &c in m.count_pos.iter().chain(&m.count_neg) {
                w.u64(c);
            }
        }
        TrainedModel::Logistic(m) => {
            w.f64(m.bias);
            w.f64s(&m.weights);
        }
        TrainedModel::Svm(m) => {
            w.f64(m.offset);
            w.f64s(&m.weights);
        }
        TrainedModel::Ridge(m) => {
            w.f64(m.bias);
            w.f64s(&m.weights);
        }
        TrainedModel::Tree(m) => {
            w.u64(m.nodes.len() as u64);
            for node in &m.nodes {
                match *node {
                    TreeNode::Leaf {
                        label,
                        n_pos,
                        n_neg,
                    } => {
                        w.u8(0);
                        w.u8(label.is_positive() as u8);
                        w.u64(n_pos);
                        w.u64(n_neg);
                    }
                    TreeNode::Split {
                        feature,
                        threshold,
                        left,
                        right,
                    } => {
                        w.u8(1);
                        w.u64(feature as u64);
                        w.f64(threshold);
                        w.u64(left as u64);
                        w.u64(right as u64);
                    }
                }
            }
        }
    }
}

impl TrainedModel {
    pub fn to_bytes(&self) -> Vec<u8> {
        let mut w = Writer::default();
        w.0.extend_from_slice(MAGIC);
        w.u32(FORMAT_VERSION);
        w.0.extend_from_slice(tag(self));
        w.u64(super::Classifier::dimension(self) as u64);
        let hyper = hyperparameters(self);
        w.u32(hyper.len() as u32);
        for (name, value) in hyper {
            w.u16(name.len() as u16);
            w.0.extend_from_slice(name.as_bytes());
            w.f64(value);
        }
        let mut payload = Writer::default();
        write_payload(self, &mut payload);
        w.u64(payload.0.len() as u64);
        w.0.extend_from_slice(&payload.0);
        let crc = crc32fast::hash(&w.0);
        w.u32(crc);
        w.0
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self, ModelError> {
        if bytes.len() < MAGIC.len() {
            return Err(if MAGIC.starts_with(bytes) {
                ModelError::Truncated
            } else {
                ModelError::BadMagic
            });
        }
        if &bytes[..8] != MAGIC {
            return Err(ModelError::BadMagic);
        }
        let mut r = Reader { buf: bytes, pos: 8 };
        let version = r.u32()?;
        if version != FORMAT_VERSION {
            return Err(ModelError::UnsupportedVersion(version));
        }
        let kind: [u8; 4] = r.array()?;
        if !matches!(&kind, b"NBAY" | b"LOGR" | b"LSVM" | b"RIDG" | b"TREE") {
            return Err(ModelError::UnknownKind(
                String::from_utf8_lossy(&kind).into_owned(),
            ));
        }
        let dim = r.usize()?;
        let n_hyper = r.u32()?;
        let mut hyper = Vec::new();
        for _ in 0..n_hyper {
            let len = r.u16()? as usize;
            let name = std::str::from_utf8(r.take(len)?)
                .map_err(|_| ModelError::Malformed("hyperparameter name is not UTF-8".into()))?
                .to_string();
            hyper.push((name, r.f64()?));
        }
        let payload_len = r.usize()?;
        let payload = r.take(payload_len)?;
        let body_end = r.pos;
        let stored = r.u32()?;
        let computed = crc32fast::hash(&bytes[..body_end]);
        if stored != computed {
            return Err(ModelError::Checksum { stored, computed });
        }
        if !r.is_done() {
            return Err(ModelError::Malformed(
                "trailing bytes after checksum".into(),
            ));
        }

        let get = |name: &str| -> Result<f64, ModelError> {
            hyper
                .iter()
                .find(|(n, _)| n == name)
                .map(|&(_, v)| v)
                .ok_or_else(|| ModelError::Malformed(format!("missing hyperparameter {name}")))
        };
        let mut p = Reader {
            buf: payload,
            pos: 0,
        };
        let model = match &kind {
            b"NBAY" => {
                let docs = [p.u64()?, p.u64()?];
                let count_pos = p.u64s(dim)?;
                let count_neg = p.u64s(dim)?;
                TrainedModel::NaiveBayes(NaiveBayesModel::from_counts(
                    get("alpha")?,
                    docs,
                    count_pos,
                    count_neg,
                )?)
            }
            b"LOGR" => {
                let bias = p.f64()?;
                TrainedModel::Logistic(LogisticModel::new(
                    p.f64s(dim)?,
                    bias,
                    get("lambda")?,
                    get("threshold")?,
                ))
            }
            b"LSVM" => {
                let offset = p.f64()?;
                TrainedModel::Svm(SvmModel::new(p.f64s(dim)?, offset, get("C")?))
            }
            b"RIDG" => {
                let bias = p.f64()?;
                TrainedModel::Ridge(RidgeModel::new(p.f64s(dim)?, bias, get("lambda")?))
            }
            _ => {
                let cap = get("feature_cap")? as usize;
                let params = TreeParams {
                    max_depth: get("max_depth")? as usize,
                    min_node_size: get("min_node_size")? as usize,
                    feature_cap: (cap > 0).then_some(cap),
                };
                TrainedModel::Tree(DecisionTreeModel {
                    dim,
                    nodes: read_tree(&mut p, dim)?,
                    params,
                })
            }
        };
        if !p.is_done() {
            return Err(ModelError::Malformed(
                "payload longer than its model".into(),
            ));
        }
        Ok(model)
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<(), ModelError> {
        let mut file = fs::File::create(path)?;
        file.write_all(&self.to_bytes())?;
        file.sync_all()?;
        Ok(())
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self, ModelError> {
        let mut bytes = Vec::new();
        fs::File::open(path)?.read_to_end(&mut bytes)?;
        Self::from_bytes(&bytes)
    }
}

fn read_tree(p: &mut Reader<'_>, dim: usize) -> Result<Vec<TreeNode>, ModelError> {
    let count = p.usize()?;
    if count == 0 {
        return Err(ModelError::Malformed("tree has no nodes".into()));
    }
    let mut nodes = Vec::with_capacity(count.min(p.buf.len()));
    for id in 0..count {
        let node = match p.u8()? {
            0 => TreeNode::Leaf {
                label: if p.u8()? == 1 {
                    Label::Positive
                } else {
                    Label::Negative
                },
                n_pos: p.u64()?,
                n_neg: p.u64()?,
            },
            1 => {
                let feature = p.usize()?;
                let threshold = p.f64()?;
                let left = p.usize()?;
                let right = p.usize()?;
                // pre-order layout: children come after their parent, which
                // also rules out cycles
                if feature >= dim || left <= id || right <= id || left >= count || right >= count {
                    return Err(ModelError::Malformed(format!("invalid split node {id}")));
                }
                TreeNode::Split {
                    feature,
                    threshold,
                    left,
                    right,
                }
            }
            t => return Err(ModelError::Malformed(format!("unknown tree node tag {t}"))),
        };
        nodes.push(node);
    }
    Ok(nodes)
}
