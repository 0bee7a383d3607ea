//! Running external solvers through `sh -c` with a timeout.

use std::io::{self, Read, Write};
use std::process::{Command, Stdio};
use std::thread;
use std::time::Duration;

use wait_timeout::ChildExt;

#[derive(Debug)]
pub struct ProcOutput {
    pub stdout: String,
    pub stderr: String,
    pub exit_code: Option<i32>,
    pub timed_out: bool,
}

/// Single-quotes `s` for a POSIX shell.
pub fn shell_quote(s: &str) -> String {
    format!("'{}'", s.replace('\'', r"'\''"))
}

/// Runs `cmd` with `sh -c`, feeding `input` on stdin. The child is killed
/// once `timeout` elapses.
pub fn run_shell(cmd: &str, input: Option<String>, timeout: Duration) -> io::Result<ProcOutput> {
    let mut command = Command::new("sh");
    command.arg("-c").arg(cmd);
    #[cfg(unix)]
    {
        use std::os::unix::process::CommandExt;
        command.process_group(0);
    }
    let mut child = command
        .stdin(if input.is_some() {
            Stdio::piped()
        } else {
            Stdio::null()
        })
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()?;

    let writer = match (input, child.stdin.take()) {
        (Some(text), Some(mut stdin)) => Some(thread::spawn(move || {
            // A solver may exit without reading everything; ignore EPIPE.
            let _ = stdin.write_all(text.as_bytes());
        })),
        _ => None,
    };
    let mut out_pipe = child.stdout.take().expect("piped stdout");
    let mut err_pipe = child.stderr.take().expect("piped stderr");
    let out_reader = thread::spawn(move || {
        let mut s = String::new();
        let _ = out_pipe.read_to_string(&mut s);
        s
    });
    let err_reader = thread::spawn(move || {
        let mut s = String::new();
        let _ = err_pipe.read_to_string(&mut s);
        s
    });

    let (exit_code, timed_out) = match child.wait_timeout(timeout)? {
        Some(status) => (status.code(), false),
        None => {
            kill_group(child.id());
            let _ = child.kill();
            let _ = child.wait();
            (None, true)
        }
    };
    if let Some(w) = writer {
        let _ = w.join();
    }
    let stdout = out_reader.join().unwrap_or_default();
    let stderr = err_reader.join().unwrap_or_default();
    Ok(ProcOutput {
        stdout,
        stderr,
        exit_code,
        timed_out,
    })
}

/// Kills the whole process group so grandchildren release the pipes.
fn kill_group(pid: u32) {
    #[cfg(unix)]
    {
        let _ = Command::new("kill")
            .args(["-KILL", "--", &format!("-{pid}")])
            .stderr(Stdio::null())
            .status();
    }
    #[cfg(not(unix))]
    let _ = pid;
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn echoes_stdin() {
        let out = run_shell("cat", Some("hello".into()), Duration::from_secs(10)).unwrap();
        assert_eq!(out.stdout, "hello");
        assert_eq!(out.exit_code, Some(0));
    }

    #[test]
    fn times_out() {
        let start = std::time::Instant::now();
        let out = run_shell("sleep 5; echo late", None, Duration::from_millis(100)).unwrap();
        assert!(out.timed_out);
        assert!(start.elapsed() < Duration::from_secs(4));
    }

    #[test]
    fn quoting() {
        let out = run_shell(&format!("printf %s {}", shell_quote("it's")), None, Duration::from_secs(10)).unwrap();
        assert_eq!(out.stdout, "it's");
    }
}
