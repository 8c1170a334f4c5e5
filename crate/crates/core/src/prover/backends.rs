use std::collections::VecDeque;
use std::fs;
use std::io::{Read, Write};
use std::path::{Path, PathBuf};
use std::process::{Command, Stdio};
use std::thread;
use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};

use super::{sha256_hex, ProverBackend, ProverError, ProverReply, ProverRequest, ProverVerdict};

/// Runs an external command on a `.thy` file. The command's arguments may
/// contain `{file}`; otherwise the file path is appended.
pub struct ProcessProver {
    command: Vec<String>,
    workdir: PathBuf,
    timeout: Duration,
}

impl ProcessProver {
    pub fn new(command: Vec<String>, workdir: PathBuf, timeout: Duration) -> Self {
        assert!(!command.is_empty(), "prover command is empty");
        assert!(!timeout.is_zero(), "prover timeout must be positive");
        ProcessProver { command, workdir, timeout }
    }
}

impl ProverBackend for ProcessProver {
    fn submit(&mut self, request: &ProverRequest) -> Result<ProverReply, ProverError> {
        let down = |e: &dyn std::fmt::Display| ProverError::SessionDown(e.to_string());
        fs::create_dir_all(&self.workdir).map_err(|e| down(&e))?;
        let file = self.workdir.join(format!("{}.thy", request.theory_name));
        fs::write(&file, &request.text).map_err(|e| down(&e))?;
        let file_arg = file.display().to_string();
        let mut args: Vec<String> = self.command[1..].iter().map(|a| a.replace("{file}", &file_arg)).collect();
        if !self.command[1..].iter().any(|a| a.contains("{file}")) {
            args.push(file_arg);
        }
        let mut child = Command::new(&self.command[0])
            .args(&args)
            .current_dir(&self.workdir)
            .stdin(Stdio::null())
            .stdout(Stdio::piped())
            .stderr(Stdio::piped())
            .spawn()
            .map_err(|e| down(&format!("{}: {e}", self.command[0])))?;
        let mut stdout = child.stdout.take().expect("piped stdout");
        let mut stderr = child.stderr.take().expect("piped stderr");
        let out_reader = thread::spawn(move || {
            let mut s = String::new();
            let _ = stdout.read_to_string(&mut s);
            s
        });
        let err_reader = thread::spawn(move || {
            let mut s = String::new();
            let _ = stderr.read_to_string(&mut s);
            s
        });
        let start = Instant::now();
        let timed_out = loop {
            if child.try_wait().map_err(|e| down(&e))?.is_some() {
                break false;
            }
            if start.elapsed() >= self.timeout {
                let _ = child.kill();
                let _ = child.wait();
                break true;
            }
            thread::sleep(Duration::from_millis(10));
        };
        if timed_out {
            // Grandchildren may still hold the pipes; leave the readers behind.
            let stage = format!("{:?}", request.kind);
            return Ok(ProverReply { raw: String::new(), verdict: Some(ProverVerdict::Timeout { stage }) });
        }
        let mut raw = out_reader.join().unwrap_or_default();
        raw.push_str(&err_reader.join().unwrap_or_default());
        Ok(ProverReply::raw(raw))
    }
}

/// One line of a prover cassette.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProverCassetteRecord {
    pub theory_sha256: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub verdict: Option<ProverVerdict>,
    #[serde(default)]
    pub raw: String,
}

pub fn load_prover_cassette(path: &Path) -> Result<Vec<ProverCassetteRecord>, ProverError> {
    let text = fs::read_to_string(path).map_err(|e| ProverError::Cassette(format!("{}: {e}", path.display())))?;
    text.lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty())
        .map(|(i, l)| {
            serde_json::from_str(l)
                .map_err(|e| ProverError::Cassette(format!("{} line {}: {e}", path.display(), i + 1)))
        })
        .collect()
}

pub fn write_prover_cassette(path: &Path, records: &[ProverCassetteRecord]) -> std::io::Result<()> {
    if let Some(dir) = path.parent() {
        fs::create_dir_all(dir)?;
    }
    let mut f = fs::File::create(path)?;
    for r in records {
        writeln!(f, "{}", serde_json::to_string(r).expect("records serialise"))?;
    }
    Ok(())
}

/// Replays a cassette in order. Each submission must match the recorded
/// theory digest.
pub struct MockProver {
    records: VecDeque<ProverCassetteRecord>,
    served: usize,
}

impl MockProver {
    pub fn new(records: Vec<ProverCassetteRecord>) -> Self {
        MockProver { records: records.into(), served: 0 }
    }

    pub fn remaining(&self) -> usize {
        self.records.len()
    }
}

impl ProverBackend for MockProver {
    fn submit(&mut self, request: &ProverRequest) -> Result<ProverReply, ProverError> {
        let record = self.records.pop_front().ok_or(ProverError::CassetteExhausted(self.served))?;
        let actual = sha256_hex(&request.text);
        if record.theory_sha256 != actual {
            return Err(ProverError::CassetteMismatch { index: self.served, expected: record.theory_sha256, actual });
        }
        self.served += 1;
        Ok(ProverReply { raw: record.raw, verdict: record.verdict })
    }
}

/// Wraps a backend and keeps a cassette of everything it answered.
pub struct RecordingProver<B> {
    inner: B,
    records: std::sync::Arc<std::sync::Mutex<Vec<ProverCassetteRecord>>>,
}

impl<B: ProverBackend> RecordingProver<B> {
    pub fn new(inner: B) -> Self {
        RecordingProver { inner, records: Default::default() }
    }

    /// Shared handle to the records, readable after the prover is moved
    /// into a session.
    pub fn records(&self) -> std::sync::Arc<std::sync::Mutex<Vec<ProverCassetteRecord>>> {
        self.records.clone()
    }
}

impl<B: ProverBackend> ProverBackend for RecordingProver<B> {
    fn submit(&mut self, request: &ProverRequest) -> Result<ProverReply, ProverError> {
        let reply = self.inner.submit(request)?;
        let verdict = reply.verdict.clone().unwrap_or_else(|| super::classify_output(&reply.raw));
        self.records.lock().expect("recording lock").push(ProverCassetteRecord {
            theory_sha256: sha256_hex(&request.text),
            verdict: Some(verdict),
            raw: reply.raw.clone(),
        });
        Ok(reply)
    }
}

/// Answers from a closure; used to script prover behaviour in tests and to
/// produce cassettes.
pub struct ScriptedProver<F> {
    script: F,
}

impl<F> ScriptedProver<F>
where
    F: FnMut(&ProverRequest) -> ProverReply + Send,
{
    pub fn new(script: F) -> Self {
        ScriptedProver { script }
    }
}

impl<F> ProverBackend for ScriptedProver<F>
where
    F: FnMut(&ProverRequest) -> ProverReply + Send,
{
    fn submit(&mut self, request: &ProverRequest) -> Result<ProverReply, ProverError> {
        Ok((self.script)(request))
    }
}
