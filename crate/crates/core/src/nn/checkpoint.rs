//! Flat binary network checkpoints.
//!
//! Layout (little-endian): magic `SNLB`, format version u32, kind u8
//! (0 dense / 1 recurrent), a kind-specific shape header, parameter count
//! u64, then raw f64 parameters in the network's flat layout. Round trips
//! are bit-exact.

use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use super::{DenseNet, NnError, OutputActivation, RecurrentClassifier};

const MAGIC: &[u8; 4] = b"SNLB";
const FORMAT_VERSION: u32 = 1;

const KIND_DENSE: u8 = 0;
const KIND_RECURRENT: u8 = 1;

fn write_u32<W: Write>(w: &mut W, v: u32) -> Result<(), NnError> {
    w.write_all(&v.to_le_bytes())?;
    Ok(())
}

fn write_u64<W: Write>(w: &mut W, v: u64) -> Result<(), NnError> {
    w.write_all(&v.to_le_bytes())?;
    Ok(())
}

fn write_f64<W: Write>(w: &mut W, v: f64) -> Result<(), NnError> {
    w.write_all(&v.to_le_bytes())?;
    Ok(())
}

fn read_u8<R: Read>(r: &mut R) -> Result<u8, NnError> {
    let mut b = [0u8; 1];
    r.read_exact(&mut b)?;
    Ok(b[0])
}

fn read_u32<R: Read>(r: &mut R) -> Result<u32, NnError> {
    let mut b = [0u8; 4];
    r.read_exact(&mut b)?;
    Ok(u32::from_le_bytes(b))
}

fn read_u64<R: Read>(r: &mut R) -> Result<u64, NnError> {
    let mut b = [0u8; 8];
    r.read_exact(&mut b)?;
    Ok(u64::from_le_bytes(b))
}

fn read_f64<R: Read>(r: &mut R) -> Result<f64, NnError> {
    let mut b = [0u8; 8];
    r.read_exact(&mut b)?;
    Ok(f64::from_le_bytes(b))
}

fn write_header<W: Write>(w: &mut W, kind: u8) -> Result<(), NnError> {
    w.write_all(MAGIC)?;
    write_u32(w, FORMAT_VERSION)?;
    w.write_all(&[kind])?;
    Ok(())
}

fn read_header<R: Read>(r: &mut R) -> Result<u8, NnError> {
    let mut magic = [0u8; 4];
    r.read_exact(&mut magic)?;
    if &magic != MAGIC {
        return Err(NnError::BadCheckpoint("bad magic".into()));
    }
    let version = read_u32(r)?;
    if version != FORMAT_VERSION {
        return Err(NnError::BadCheckpoint(format!(
            "unsupported format version {version}"
        )));
    }
    read_u8(r)
}

fn write_params<W: Write>(w: &mut W, params: &[f64]) -> Result<(), NnError> {
    write_u64(w, params.len() as u64)?;
    for &p in params {
        write_f64(w, p)?;
    }
    Ok(())
}

fn read_params<R: Read>(r: &mut R, expected: usize) -> Result<Vec<f64>, NnError> {
    let n = read_u64(r)? as usize;
    if n != expected {
        return Err(NnError::BadCheckpoint(format!(
            "parameter count {n} does not match shape header ({expected})"
        )));
    }
    let mut params = Vec::with_capacity(n);
    for _ in 0..n {
        params.push(read_f64(r)?);
    }
    Ok(params)
}

pub fn save_dense(net: &DenseNet, path: &Path) -> Result<(), NnError> {
    let mut w = BufWriter::new(File::create(path)?);
    write_header(&mut w, KIND_DENSE)?;
    match net.output_activation() {
        OutputActivation::Identity => w.write_all(&[0])?,
        OutputActivation::ScaledTanh { lo, hi } => {
            w.write_all(&[1])?;
            write_f64(&mut w, lo)?;
            write_f64(&mut w, hi)?;
        }
    }
    write_u32(&mut w, net.dims().len() as u32)?;
    for &d in net.dims() {
        write_u32(&mut w, d as u32)?;
    }
    write_params(&mut w, net.params())?;
    w.flush()?;
    Ok(())
}

pub fn load_dense(path: &Path) -> Result<DenseNet, NnError> {
    let mut r = BufReader::new(File::open(path)?);
    if read_header(&mut r)? != KIND_DENSE {
        return Err(NnError::BadCheckpoint(
            "expected a dense network checkpoint".into(),
        ));
    }
    let output = match read_u8(&mut r)? {
        0 => OutputActivation::Identity,
        1 => {
            let lo = read_f64(&mut r)?;
            let hi = read_f64(&mut r)?;
            OutputActivation::ScaledTanh { lo, hi }
        }
        k => return Err(NnError::BadCheckpoint(format!("unknown output head {k}"))),
    };
    let ndims = read_u32(&mut r)? as usize;
    if !(2..=64).contains(&ndims) {
        return Err(NnError::BadCheckpoint(format!("implausible rank {ndims}")));
    }
    let mut dims = Vec::with_capacity(ndims);
    for _ in 0..ndims {
        dims.push(read_u32(&mut r)? as usize);
    }
    if dims.iter().any(|&d| d == 0) {
        return Err(NnError::BadCheckpoint("zero-width layer".into()));
    }
    let params = read_params(&mut r, DenseNet::param_count(&dims))?;
    Ok(DenseNet::from_parts(dims, params, output))
}

pub fn save_recurrent(net: &RecurrentClassifier, path: &Path) -> Result<(), NnError> {
    let mut w = BufWriter::new(File::create(path)?);
    write_header(&mut w, KIND_RECURRENT)?;
    write_u32(&mut w, net.input_dim() as u32)?;
    write_u32(&mut w, net.hidden_dim() as u32)?;
    write_u32(&mut w, net.num_classes() as u32)?;
    write_u32(&mut w, net.window() as u32)?;
    write_params(&mut w, net.params())?;
    w.flush()?;
    Ok(())
}

pub fn load_recurrent(path: &Path) -> Result<RecurrentClassifier, NnError> {
    let mut r = BufReader::new(File::open(path)?);
    if read_header(&mut r)? != KIND_RECURRENT {
        return Err(NnError::BadCheckpoint(
            "expected a recurrent network checkpoint".into(),
        ));
    }
    let input_dim = read_u32(&mut r)? as usize;
    let hidden_dim = read_u32(&mut r)? as usize;
    let num_classes = read_u32(&mut r)? as usize;
    let window = read_u32(&mut r)? as usize;
    if input_dim == 0 || hidden_dim == 0 || num_classes == 0 || window == 0 {
        return Err(NnError::BadCheckpoint("zero shape field".into()));
    }
    let params = read_params(&mut r, RecurrentClassifier::param_count(
        input_dim, hidden_dim, num_classes,
    ))?;
    Ok(RecurrentClassifier::from_parts(
        input_dim,
        hidden_dim,
        num_classes,
        window,
        params,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::derive_rng;
    use tempfile::tempdir;

    #[test]
    fn dense_round_trip_bit_exact() {
        let dir = tempdir().unwrap();
        let path = dir.path().join("actor.net");
        let mut rng = derive_rng(100, "ckpt", &[0]);
        let net = DenseNet::init(
            &[3, 32, 32, 1],
            OutputActivation::ScaledTanh { lo: -9.0, hi: 9.0 },
            &mut rng,
        );
        save_dense(&net, &path).unwrap();
        let loaded = load_dense(&path).unwrap();
        assert_eq!(net.dims(), loaded.dims());
        assert_eq!(net.params(), loaded.params());
        let x = [0.3, 0.8, -4.0];
        assert_eq!(net.eval(&x).unwrap(), loaded.eval(&x).unwrap());
    }

    #[test]
    fn recurrent_round_trip_bit_exact() {
        let dir = tempdir().unwrap();
        let path = dir.path().join("predictor.net");
        let mut rng = derive_rng(101, "ckpt", &[1]);
        let net = RecurrentClassifier::init(3, 12, 3, 5, &mut rng);
        save_recurrent(&net, &path).unwrap();
        let loaded = load_recurrent(&path).unwrap();
        assert_eq!(net.params(), loaded.params());
        assert_eq!(net.window(), loaded.window());
    }

    #[test]
    fn kind_mismatch_rejected() {
        let dir = tempdir().unwrap();
        let path = dir.path().join("net.bin");
        let net = DenseNet::zeros(&[2, 2], OutputActivation::Identity);
        save_dense(&net, &path).unwrap();
        assert!(load_recurrent(&path).is_err());
    }

    #[test]
    fn corrupt_magic_rejected() {
        let dir = tempdir().unwrap();
        let path = dir.path().join("net.bin");
        std::fs::write(&path, b"XXXX0000").unwrap();
        assert!(load_dense(&path).is_err());
    }
}
