//! Binary persistence of a trained dictionary and classifier.
//!
//! Layout (little-endian): `"BOWM"`, version `u32`, K `u32`, classes `u32`,
//! K x 128 centroid `f32`s, then per class K weight `f32`s and a bias `f32`.

use super::kmeans::Dictionary;
use super::sift::DESCRIPTOR_LEN;
use super::svm::LinearSvmModel;
use super::BowError;

pub const MAGIC: [u8; 4] = *b"BOWM";
pub const VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq)]
pub struct BowModel {
    dictionary: Dictionary,
    svm: LinearSvmModel,
}

impl BowModel {
    pub fn new(dictionary: Dictionary, svm: LinearSvmModel) -> Result<Self, BowError> {
        if dictionary.dim() != DESCRIPTOR_LEN {
            return Err(BowError::DimMismatch { expected: DESCRIPTOR_LEN, got: dictionary.dim() });
        }
        if svm.dim() != dictionary.k() {
            return Err(BowError::DimMismatch { expected: dictionary.k(), got: svm.dim() });
        }
        Ok(Self { dictionary, svm })
    }

    pub fn dictionary(&self) -> &Dictionary {
        &self.dictionary
    }

    pub fn svm(&self) -> &LinearSvmModel {
        &self.svm
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        let k = self.dictionary.k();
        let classes = self.svm.classes();
        let mut out = Vec::with_capacity(16 + 4 * (k * DESCRIPTOR_LEN + classes * (k + 1)));
        out.extend_from_slice(&MAGIC);
        for v in [VERSION, k as u32, classes as u32] {
            out.extend_from_slice(&v.to_le_bytes());
        }
        let floats = self
            .dictionary
            .centroids()
            .iter()
            .copied()
            .chain((0..classes).flat_map(|c| self.svm.weights(c).iter().copied().chain([self.svm.bias(c)])));
        for f in floats {
            out.extend_from_slice(&f.to_le_bytes());
        }
        out
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self, BowError> {
        let word = |i: usize| -> Result<u32, BowError> {
            bytes
                .get(i..i + 4)
                .map(|b| u32::from_le_bytes(b.try_into().expect("4 bytes")))
                .ok_or(BowError::Blob(format!("truncated header at byte {i}")))
        };
        if bytes.get(..4) != Some(&MAGIC[..]) {
            return Err(BowError::Blob("bad magic".into()));
        }
        let version = word(4)?;
        if version != VERSION {
            return Err(BowError::Blob(format!("unsupported version {version}")));
        }
        let (k, classes) = (word(8)? as usize, word(12)? as usize);
        let n_floats = k
            .checked_mul(DESCRIPTOR_LEN)
            .and_then(|c| classes.checked_mul(k + 1).and_then(|w| c.checked_add(w)))
            .ok_or(BowError::Blob("size overflow".into()))?;
        let body = &bytes[16..];
        if Some(body.len()) != n_floats.checked_mul(4) {
            return Err(BowError::Blob(format!("expected {} payload bytes, found {}", n_floats * 4, body.len())));
        }
        let floats: Vec<f32> =
            body.chunks_exact(4).map(|b| f32::from_le_bytes(b.try_into().expect("4 bytes"))).collect();
        let (centroids, rest) = floats.split_at(k * DESCRIPTOR_LEN);
        let mut weights = Vec::with_capacity(classes * k);
        let mut bias = Vec::with_capacity(classes);
        for row in rest.chunks_exact(k + 1) {
            weights.extend_from_slice(&row[..k]);
            bias.push(row[k]);
        }
        let dictionary = Dictionary::new(k, DESCRIPTOR_LEN, centroids.to_vec())?;
        // C is a training-time setting and is not persisted.
        let svm = LinearSvmModel::new(classes, k, weights, bias, f32::NAN)?;
        Self::new(dictionary, svm)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::image::SplitMix64;

    fn model(k: usize) -> BowModel {
        let mut rng = SplitMix64::new(4);
        let mut r = |n: usize| (0..n).map(|_| rng.unit_f32()).collect::<Vec<_>>();
        let dict = Dictionary::new(k, DESCRIPTOR_LEN, r(k * DESCRIPTOR_LEN)).unwrap();
        let svm = LinearSvmModel::new(10, k, r(10 * k), r(10), 1.0).unwrap();
        BowModel::new(dict, svm).unwrap()
    }

    #[test]
    fn round_trip() {
        let m = model(5);
        let bytes = m.to_bytes();
        assert_eq!(&bytes[..4], b"BOWM");
        assert_eq!(bytes.len(), 16 + 4 * (5 * 128 + 10 * 6));
        let back = BowModel::from_bytes(&bytes).unwrap();
        assert_eq!(back.dictionary(), m.dictionary());
        assert_eq!(back.svm().weights(9), m.svm().weights(9));
        assert_eq!(back.svm().bias(3), m.svm().bias(3));
    }

    #[test]
    fn rejects_corruption() {
        let bytes = model(2).to_bytes();
        let mut bad = bytes.clone();
        bad[0] = b'X';
        assert!(BowModel::from_bytes(&bad).is_err());
        let mut bad = bytes.clone();
        bad[4] = 9;
        assert!(BowModel::from_bytes(&bad).is_err());
        assert!(BowModel::from_bytes(&bytes[..bytes.len() - 1]).is_err());
        assert!(BowModel::from_bytes(&bytes[..10]).is_err());
    }
}
