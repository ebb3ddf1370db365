//! Model file format: a portable line-oriented text format with explicit
//! dimensions and row-major weight listings, tagged `synthgen-model v1`.
//! Floats are written in shortest-roundtrip form, so save → load → save is
//! byte-identical and loaded models reproduce outputs bitwise.

use std::fmt::Write as _;
use std::path::Path;

use super::{ArchitectureConfig, ModelKind, ReconLoss, TrainedModel};
use crate::error::{Error, Result};
use crate::nn::{Activation, DenseLayer, NetworkParams};

pub const FORMAT_TAG: &str = "synthgen-model v1";

fn push_network(out: &mut String, name: &str, net: &NetworkParams) {
    writeln!(out, "network {name} {}", net.layers.len()).unwrap();
    for layer in &net.layers {
        writeln!(out, "layer {} {} {}", layer.out_dim, layer.in_dim, layer.activation.name()).unwrap();
        for row in 0..layer.out_dim {
            let cells: Vec<String> = layer.weights[row * layer.in_dim..(row + 1) * layer.in_dim]
                .iter()
                .map(|v| format!("{v}"))
                .collect();
            writeln!(out, "{}", cells.join(" ")).unwrap();
        }
        let bias: Vec<String> = layer.bias.iter().map(|v| format!("{v}")).collect();
        writeln!(out, "{}", bias.join(" ")).unwrap();
    }
}

/// Serialize a model to its canonical text form.
pub fn model_to_string(model: &TrainedModel) -> String {
    let c = &model.config;
    let mut out = String::new();
    writeln!(out, "{FORMAT_TAG}").unwrap();
    writeln!(out, "kind {}", c.model_kind.name()).unwrap();
    writeln!(out, "mcd_decoder {}", c.mcd_decoder).unwrap();
    writeln!(out, "input_width {}", c.input_width).unwrap();
    writeln!(out, "hidden_m {}", c.hidden_m).unwrap();
    writeln!(out, "hidden_n {}", c.hidden_n).unwrap();
    writeln!(out, "latent {}", c.latent).unwrap();
    writeln!(out, "keep_rate {}", c.keep_rate).unwrap();
    writeln!(out, "recon_loss {}", c.recon_loss.name()).unwrap();
    writeln!(out, "epochs {}", c.epochs).unwrap();
    writeln!(out, "learning_rate {}", c.learning_rate).unwrap();
    writeln!(out, "batch_size {}", c.batch_size).unwrap();
    writeln!(out, "seed {}", c.seed).unwrap();
    let fingerprint = if model.schema_fingerprint.is_empty() {
        "-"
    } else {
        &model.schema_fingerprint
    };
    writeln!(out, "schema_fingerprint {fingerprint}").unwrap();
    let trace: Vec<String> = model.loss_trace.iter().map(|v| format!("{v}")).collect();
    writeln!(out, "loss_trace {} {}", trace.len(), trace.join(" ")).unwrap();
    push_network(&mut out, "encoder", &model.encoder);
    push_network(&mut out, "decoder", &model.decoder);
    writeln!(out, "end").unwrap();
    out
}

pub fn save_model(model: &TrainedModel, path: impl AsRef<Path>) -> Result<()> {
    std::fs::write(path, model_to_string(model))?;
    Ok(())
}

struct Lines<'a> {
    path: &'a Path,
    inner: std::str::Lines<'a>,
    line: usize,
}

impl<'a> Lines<'a> {
    fn next(&mut self) -> Result<&'a str> {
        self.line += 1;
        self.inner
            .next()
            .ok_or_else(|| Error::format(self.path, self.line, "unexpected end of file"))
    }

    fn err(&self, message: impl Into<String>) -> Error {
        Error::format(self.path, self.line, message)
    }

    /// Next line as `key <value>` with the expected key.
    fn keyed(&mut self, key: &str) -> Result<&'a str> {
        let line = self.next()?;
        line.strip_prefix(key)
            .and_then(|rest| rest.strip_prefix(' '))
            .ok_or_else(|| self.err(format!("expected '{key} <value>', found '{line}'")))
    }

    fn parse<T: std::str::FromStr>(&mut self, key: &str) -> Result<T> {
        let value = self.keyed(key)?;
        value
            .parse()
            .map_err(|_| self.err(format!("cannot parse '{value}' as {key}")))
    }

    fn floats(&self, text: &str, expected: usize) -> Result<Vec<f64>> {
        let values: Vec<f64> = text
            .split_whitespace()
            .map(|tok| tok.parse::<f64>())
            .collect::<std::result::Result<_, _>>()
            .map_err(|_| self.err("malformed float"))?;
        if values.len() != expected {
            return Err(self.err(format!("expected {expected} values, found {}", values.len())));
        }
        Ok(values)
    }
}

fn read_network(lines: &mut Lines, name: &str) -> Result<NetworkParams> {
    let header = lines.next()?;
    let layer_count: usize = header
        .strip_prefix("network ")
        .and_then(|rest| rest.strip_prefix(name))
        .and_then(|rest| rest.trim().parse().ok())
        .ok_or_else(|| lines.err(format!("expected 'network {name} <layers>', found '{header}'")))?;
    let mut layers = Vec::with_capacity(layer_count);
    for _ in 0..layer_count {
        let spec = lines.next()?;
        let parts: Vec<&str> = spec.split_whitespace().collect();
        let (out_dim, in_dim, activation) = match parts.as_slice() {
            ["layer", out, inp, act] => {
                let out_dim: usize = out.parse().map_err(|_| lines.err("bad layer out dim"))?;
                let in_dim: usize = inp.parse().map_err(|_| lines.err("bad layer in dim"))?;
                let activation = Activation::from_name(act)
                    .ok_or_else(|| lines.err(format!("unknown activation '{act}'")))?;
                (out_dim, in_dim, activation)
            }
            _ => return Err(lines.err(format!("expected 'layer <out> <in> <activation>', found '{spec}'"))),
        };
        let mut layer = DenseLayer::zeros(in_dim, out_dim, activation);
        for row in 0..out_dim {
            let text = lines.next()?;
            let values = lines.floats(text, in_dim)?;
            layer.weights[row * in_dim..(row + 1) * in_dim].copy_from_slice(&values);
        }
        let text = lines.next()?;
        layer.bias = lines.floats(text, out_dim)?;
        layers.push(layer);
    }
    NetworkParams::new(layers)
}

/// Load a model saved by [`save_model`], validating the format tag and all
/// dimensions.
pub fn load_model(path: impl AsRef<Path>) -> Result<TrainedModel> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path)?;
    let mut lines = Lines {
        path,
        inner: text.lines(),
        line: 0,
    };

    let tag = lines.next()?;
    if tag != FORMAT_TAG {
        return Err(lines.err(format!("format tag '{tag}', expected '{FORMAT_TAG}'")));
    }
    let kind_name = lines.keyed("kind")?;
    let model_kind = ModelKind::from_name(kind_name)
        .ok_or_else(|| lines.err(format!("unknown model kind '{kind_name}'")))?;
    let mcd_decoder: bool = lines.parse("mcd_decoder")?;
    let input_width: usize = lines.parse("input_width")?;
    let hidden_m: usize = lines.parse("hidden_m")?;
    let hidden_n: usize = lines.parse("hidden_n")?;
    let latent: usize = lines.parse("latent")?;
    let keep_rate: f64 = lines.parse("keep_rate")?;
    let recon_name = lines.keyed("recon_loss")?;
    let recon_loss = ReconLoss::from_name(recon_name)
        .ok_or_else(|| lines.err(format!("unknown reconstruction loss '{recon_name}'")))?;
    let epochs: usize = lines.parse("epochs")?;
    let learning_rate: f64 = lines.parse("learning_rate")?;
    let batch_size: usize = lines.parse("batch_size")?;
    let seed: u64 = lines.parse("seed")?;
    let fingerprint = lines.keyed("schema_fingerprint")?;
    let schema_fingerprint = if fingerprint == "-" { String::new() } else { fingerprint.to_string() };

    let trace_line = lines.keyed("loss_trace")?;
    let mut trace_parts = trace_line.split_whitespace();
    let trace_len: usize = trace_parts
        .next()
        .and_then(|tok| tok.parse().ok())
        .ok_or_else(|| lines.err("bad loss_trace length"))?;
    let loss_trace: Vec<f64> = trace_parts
        .map(|tok| tok.parse::<f64>())
        .collect::<std::result::Result<_, _>>()
        .map_err(|_| lines.err("malformed loss_trace value"))?;
    if loss_trace.len() != trace_len {
        return Err(lines.err(format!(
            "loss_trace declares {trace_len} values, found {}",
            loss_trace.len()
        )));
    }

    let config = ArchitectureConfig {
        input_width,
        hidden_m,
        hidden_n,
        latent,
        keep_rate,
        model_kind,
        mcd_decoder,
        recon_loss,
        epochs,
        learning_rate,
        batch_size,
        seed,
    };
    config.validate()?;

    let encoder = read_network(&mut lines, "encoder")?;
    let decoder = read_network(&mut lines, "decoder")?;
    let end = lines.next()?;
    if end != "end" {
        return Err(lines.err(format!("expected trailing 'end', found '{end}'")));
    }

    if encoder.input_dim() != input_width || encoder.output_dim() != config.encoder_output_width() {
        return Err(lines.err(format!(
            "encoder is {}→{}, config demands {}→{}",
            encoder.input_dim(),
            encoder.output_dim(),
            input_width,
            config.encoder_output_width()
        )));
    }
    if decoder.input_dim() != latent || decoder.output_dim() != input_width {
        return Err(lines.err(format!(
            "decoder is {}→{}, config demands {latent}→{input_width}",
            decoder.input_dim(),
            decoder.output_dim(),
        )));
    }

    Ok(TrainedModel {
        config,
        encoder,
        decoder,
        schema_fingerprint,
        loss_trace,
    })
}
