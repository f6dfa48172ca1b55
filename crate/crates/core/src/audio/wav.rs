//! PCM WAV input and output.

use std::path::Path;

use hound::{SampleFormat, WavReader, WavSpec, WavWriter};

use crate::error::{Error, Result};

/// Mono samples in `[-1, 1]` together with the file's sample rate.
#[derive(Debug, Clone, PartialEq)]
pub struct Recording {
    pub samples: Vec<f64>,
    pub sample_rate: u32,
}

impl Recording {
    pub fn duration_s(&self) -> f64 {
        self.samples.len() as f64 / f64::from(self.sample_rate)
    }
}

fn classify(path: &Path, err: hound::Error) -> Error {
    let path = path.to_path_buf();
    match err {
        hound::Error::Unsupported => Error::UnsupportedAudio {
            path,
            reason: "unsupported WAV encoding".into(),
        },
        hound::Error::IoError(e) if e.kind() == std::io::ErrorKind::NotFound => {
            Error::Io { path, source: e }
        }
        other => Error::CorruptAudio {
            path,
            reason: other.to_string(),
        },
    }
}

/// Reads an 8/16/24/32-bit integer or 32-bit float WAV file. Multichannel
/// audio is averaged down to mono.
pub fn load_wav(path: &Path) -> Result<Recording> {
    let mut reader = WavReader::open(path).map_err(|e| classify(path, e))?;
    let spec = reader.spec();
    if spec.channels == 0 || spec.channels > 2 {
        return Err(Error::UnsupportedAudio {
            path: path.to_path_buf(),
            reason: format!("{} channels", spec.channels),
        });
    }
    let interleaved: Vec<f64> = match (spec.sample_format, spec.bits_per_sample) {
        (SampleFormat::Int, bits @ (8 | 16 | 24 | 32)) => {
            let scale = 2f64.powi(i32::from(bits) - 1);
            reader
                .samples::<i32>()
                .map(|s| s.map(|v| f64::from(v) / scale))
                .collect::<std::result::Result<_, _>>()
                .map_err(|e| classify(path, e))?
        }
        (SampleFormat::Float, 32) => reader
            .samples::<f32>()
            .map(|s| s.map(f64::from))
            .collect::<std::result::Result<_, _>>()
            .map_err(|e| classify(path, e))?,
        (format, bits) => {
            return Err(Error::UnsupportedAudio {
                path: path.to_path_buf(),
                reason: format!("{bits}-bit {format:?} samples"),
            })
        }
    };
    let channels = usize::from(spec.channels);
    if !interleaved.len().is_multiple_of(channels) {
        return Err(Error::CorruptAudio {
            path: path.to_path_buf(),
            reason: "partial sample frame at end of data".into(),
        });
    }
    let samples = interleaved
        .chunks_exact(channels)
        .map(|frame| frame.iter().sum::<f64>() / channels as f64)
        .collect();
    Ok(Recording {
        samples,
        sample_rate: spec.sample_rate,
    })
}

/// Writes mono 16-bit PCM with the same `2¹⁵` scaling [`load_wav`] uses.
pub fn write_wav(path: &Path, samples: &[f64], sample_rate: u32) -> Result<()> {
    let spec = WavSpec {
        channels: 1,
        sample_rate,
        bits_per_sample: 16,
        sample_format: SampleFormat::Int,
    };
    let io_err = |e: hound::Error| match e {
        hound::Error::IoError(e) => Error::io(path, e),
        other => Error::InvalidInput(other.to_string()),
    };
    let mut writer = WavWriter::create(path, spec).map_err(io_err)?;
    for &s in samples {
        let v = (s * 32768.0).round().clamp(-32768.0, 32767.0) as i16;
        writer.write_sample(v).map_err(io_err)?;
    }
    writer.finalize().map_err(io_err)
}
