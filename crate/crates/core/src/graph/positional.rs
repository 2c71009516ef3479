use crate::error::{Error, Result};

/// Fixed sinusoidal embedding of a position: entry `2i` is
/// `sin(pos / 10000^(2i/d))`, entry `2i+1` the cosine of the same angle.
pub fn positional_embedding(pos: usize, d_emb: usize) -> Result<Vec<f64>> {
    if d_emb < 2 || !d_emb.is_multiple_of(2) {
        return Err(Error::EmbeddingSize(d_emb));
    }
    let mut out = vec![0.0; d_emb];
    for i in 0..d_emb / 2 {
        let angle = pos as f64 * 10000f64.powf(-((2 * i) as f64) / d_emb as f64);
        out[2 * i] = angle.sin();
        out[2 * i + 1] = angle.cos();
    }
    Ok(out)
}
