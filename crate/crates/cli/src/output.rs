use std::fs::File;
use std::io::{self, Write};

use qdiscord::export::{format_f64, write_json, JsonEnvelope};
use qdiscord::ChiMode;
use serde::Serialize;

use crate::args::{Cli, Format};

/// Collects the rendered output and writes it to `--out` or stdout in one go.
pub struct Sink<'a> {
    cli: &'a Cli,
    buf: Vec<u8>,
}

impl<'a> Sink<'a> {
    pub fn new(cli: &'a Cli) -> Self {
        Sink { cli, buf: Vec::new() }
    }

    pub fn format(&self) -> Format {
        self.cli.global.format
    }

    pub fn writer(&mut self) -> &mut Vec<u8> {
        &mut self.buf
    }

    pub fn csv(&mut self, header: &[&str], rows: &[Vec<String>]) -> io::Result<()> {
        let mut out = csv::Writer::from_writer(&mut self.buf);
        out.write_record(header)?;
        for r in rows {
            out.write_record(r)?;
        }
        out.flush()
    }

    pub fn json<D: Serialize>(&mut self, data: &D) -> io::Result<()> {
        let config = serde_json::json!({
            "global": &self.cli.global,
            "args": &self.cli.command,
        });
        let mode: ChiMode = self.cli.global.chi_mode.into();
        let envelope = JsonEnvelope::new(self.cli.command.name(), mode, &config, data);
        write_json(&envelope, &mut self.buf)
    }

    pub fn finish(self) -> io::Result<()> {
        match &self.cli.global.out {
            Some(path) => File::create(path)?.write_all(&self.buf),
            None => {
                let mut out = io::stdout().lock();
                match out.write_all(&self.buf).and_then(|()| out.flush()) {
                    // reader went away (e.g. piped into `head`)
                    Err(e) if e.kind() == io::ErrorKind::BrokenPipe => Ok(()),
                    r => r,
                }
            }
        }
    }
}

pub fn num(x: f64) -> String {
    format_f64(x)
}

pub fn opt(x: Option<f64>) -> String {
    x.map(format_f64).unwrap_or_default()
}
