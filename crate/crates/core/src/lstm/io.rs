//! Model file: `HRDLSTM\0`, u32 LE version, u32 LE header length, a JSON
//! header (vocabulary, shape, dropout rates, seed), then every parameter as
//! a little-endian f64 in layout order.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::model::Shape;
use super::{LstmError, LstmModel, Vocabulary, MAX_LEN};

pub const LSTM_MAGIC: &[u8; 8] = b"HRDLSTM\0";
pub const LSTM_VERSION: u32 = 1;

#[derive(Serialize, Deserialize)]
struct Header {
    vocabulary: Vec<String>,
    shape: Shape,
    max_len: usize,
    dropout: f64,
    recurrent_dropout: f64,
    seed: u64,
    n_params: usize,
}

fn take<'a>(bytes: &mut &'a [u8], n: usize, what: &str) -> Result<&'a [u8], LstmError> {
    if bytes.len() < n {
        return Err(LstmError::Format(format!("truncated {what}")));
    }
    let (head, rest) = bytes.split_at(n);
    *bytes = rest;
    Ok(head)
}

fn read_u32(bytes: &mut &[u8], what: &str) -> Result<u32, LstmError> {
    let b = take(bytes, 4, what)?;
    Ok(u32::from_le_bytes(b.try_into().expect("4 bytes")))
}

impl LstmModel {
    pub fn to_bytes(&self) -> Vec<u8> {
        let header = Header {
            vocabulary: self.vocab.words().to_vec(),
            shape: self.shape,
            max_len: MAX_LEN,
            dropout: self.dropout,
            recurrent_dropout: self.recurrent_dropout,
            seed: self.seed,
            n_params: self.params.len(),
        };
        let json = serde_json::to_vec(&header).expect("header serializes");
        let mut out = Vec::with_capacity(16 + json.len() + 8 * self.params.len());
        out.extend_from_slice(LSTM_MAGIC);
        out.extend_from_slice(&LSTM_VERSION.to_le_bytes());
        out.extend_from_slice(&(json.len() as u32).to_le_bytes());
        out.extend_from_slice(&json);
        for p in &self.params {
            out.extend_from_slice(&p.to_le_bytes());
        }
        out
    }

    pub fn from_bytes(mut bytes: &[u8]) -> Result<Self, LstmError> {
        let b = &mut bytes;
        if take(b, 8, "magic")? != LSTM_MAGIC {
            return Err(LstmError::Format("missing magic header".into()));
        }
        let version = read_u32(b, "version")?;
        if version != LSTM_VERSION {
            return Err(LstmError::Version {
                found: version,
                expected: LSTM_VERSION,
            });
        }
        let len = read_u32(b, "header length")? as usize;
        let header: Header =
            serde_json::from_slice(take(b, len, "header")?).map_err(|e| LstmError::Format(e.to_string()))?;
        let vocab = Vocabulary::from_words(header.vocabulary)?;
        if vocab.len() != header.shape.vocab || header.max_len != MAX_LEN {
            return Err(LstmError::Format("header shape disagrees with vocabulary".into()));
        }
        let expected = header.shape.layout().len;
        if header.n_params != expected || b.len() != 8 * expected {
            return Err(LstmError::Format(format!(
                "expected {expected} parameters, found {} bytes",
                b.len()
            )));
        }
        let params: Vec<f64> = b.chunks_exact(8).map(|c| f64::from_le_bytes(c.try_into().expect("8 bytes"))).collect();
        if params.iter().any(|p| !p.is_finite()) {
            return Err(LstmError::Format("non-finite parameter".into()));
        }
        Ok(Self {
            vocab,
            shape: header.shape,
            dropout: header.dropout,
            recurrent_dropout: header.recurrent_dropout,
            seed: header.seed,
            params,
        })
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<(), LstmError> {
        let path = path.as_ref();
        fs::write(path, self.to_bytes()).map_err(|source| LstmError::Io {
            path: path.display().to_string(),
            source,
        })
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self, LstmError> {
        let path = path.as_ref();
        let bytes = fs::read(path).map_err(|source| LstmError::Io {
            path: path.display().to_string(),
            source,
        })?;
        Self::from_bytes(&bytes)
    }
}
