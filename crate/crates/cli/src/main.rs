mod params;

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use anyhow::{bail, Context, Result};
use bfvlab::attacks::circuit_privacy_recover;
use bfvlab::bfv::codec::{Envelope, Kind};
use bfvlab::bfv::{decrypt, encrypt, keygen, ParamSet, Plaintext};
use bfvlab::lab::{derive_rng, run_bitleak, run_cca, run_circuit, run_encoder, AttackReport};
use bfvlab::psi::{
    run_session, AliceInputs, AliceMode, BobInputs, BobStrategy, SessionRegistry, Transcript,
};
use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::params::ParamChoice;

#[derive(Parser)]
#[command(
    name = "bfvlab",
    version,
    about = "Toy BFV encryption and attack laboratory"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a key pair.
    Keygen(KeygenArgs),
    /// Encrypt a plaintext under a public key.
    Encrypt(EncryptArgs),
    /// Decrypt a ciphertext with a secret key.
    Decrypt(DecryptArgs),
    /// Run one of the attacks against freshly generated keys.
    Attack(AttackArgs),
    /// Run one session of the private equality protocol.
    Psi(PsiArgs),
    /// Re-verify a protocol transcript.
    Replay(ReplayArgs),
}

#[derive(Args)]
struct KeygenArgs {
    /// Parameter set name or d=..,q=..,t=..[,sigma=..]
    #[arg(long, default_value = "cca-1024")]
    params: ParamChoice,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Directory receiving secret_key.json and public_key.json
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct EncryptArgs {
    /// Public key file
    #[arg(long)]
    pk: PathBuf,
    /// JSON array of plaintext coefficients, or a plaintext file
    #[arg(long)]
    input: PathBuf,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct DecryptArgs {
    /// Secret key file
    #[arg(long)]
    sk: PathBuf,
    /// Ciphertext file
    #[arg(long)]
    input: PathBuf,
    /// Plaintext file to write; coefficients are always printed
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum AttackName {
    Cca,
    Bitleak,
    Circuit,
    Encoder,
}

impl AttackName {
    fn default_params(self) -> ParamSet {
        match self {
            AttackName::Cca | AttackName::Encoder => ParamSet::Cca1024,
            AttackName::Bitleak => ParamSet::Bitleak2048,
            AttackName::Circuit => ParamSet::Psi83,
        }
    }

    fn label(self) -> &'static str {
        match self {
            AttackName::Cca => "cca",
            AttackName::Bitleak => "bitleak",
            AttackName::Circuit => "circuit",
            AttackName::Encoder => "encoder",
        }
    }
}

#[derive(Args)]
struct AttackArgs {
    #[arg(value_enum)]
    name: AttackName,
    /// Defaults to cca-1024 (cca, encoder), bitleak-2048 or psi-83 (circuit)
    #[arg(long)]
    params: Option<ParamChoice>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 1)]
    trials: usize,
    /// Circuit only: Bob floods with uniform noise in [-2^bits, 2^bits]
    #[arg(long, value_name = "BITS")]
    flood: Option<u32>,
    /// Report file (default: <name>-report.json)
    #[arg(long)]
    out: Option<PathBuf>,
    /// Record wall-clock time in the report, making it run-dependent
    #[arg(long)]
    timing: bool,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum StrategyName {
    Honest,
    Flooding,
    MaliciousProbe,
}

#[derive(Args)]
struct PsiArgs {
    #[arg(long, default_value = "psi-83")]
    params: ParamChoice,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Alice's element
    #[arg(long, allow_hyphen_values = true)]
    a: i64,
    /// Bob's element
    #[arg(long, allow_hyphen_values = true)]
    b: i64,
    /// Bob's multiplier; random nonzero when omitted
    #[arg(long, allow_hyphen_values = true)]
    r: Option<i64>,
    #[arg(long, value_enum, default_value = "honest")]
    strategy: StrategyName,
    /// Key coefficient probed by a malicious Bob
    #[arg(long)]
    index: Option<usize>,
    /// Flooding bound exponent for the flooding strategy
    #[arg(long, value_name = "BITS", default_value_t = 30)]
    flood: u32,
    /// Alice keeps her encryption randomness in the transcript
    #[arg(long)]
    retain_witness: bool,
    /// Transcript file
    #[arg(long, default_value = "psi-transcript.json")]
    out: PathBuf,
}

#[derive(Args)]
struct ReplayArgs {
    /// Transcript file
    #[arg(long)]
    input: PathBuf,
}

fn main() -> ExitCode {
    // usage errors exit 1 so that 2 stays reserved for "blocked"
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::FAILURE
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    let result = match cli.command {
        Command::Keygen(a) => cmd_keygen(a),
        Command::Encrypt(a) => cmd_encrypt(a),
        Command::Decrypt(a) => cmd_decrypt(a),
        Command::Attack(a) => cmd_attack(a),
        Command::Psi(a) => cmd_psi(a),
        Command::Replay(a) => cmd_replay(a),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))
}

fn write(path: &Path, contents: &str) -> Result<()> {
    fs::write(path, contents).with_context(|| format!("cannot write {}", path.display()))
}

fn read_envelope(path: &Path, kind: Kind) -> Result<Envelope> {
    let env = Envelope::from_json(&read(path)?)
        .with_context(|| format!("{} is not a valid key or ciphertext file", path.display()))?;
    if env.kind != kind {
        bail!(
            "{} holds a {:?}, expected a {kind:?}",
            path.display(),
            env.kind
        );
    }
    Ok(env)
}

fn cmd_keygen(args: KeygenArgs) -> Result<ExitCode> {
    let params = args.params.params;
    let (sk, pk) = keygen(&params, &mut derive_rng(args.seed, 0));
    fs::create_dir_all(&args.out)
        .with_context(|| format!("cannot create {}", args.out.display()))?;
    write(
        &args.out.join("secret_key.json"),
        &Envelope::secret_key(&sk, &params).to_json(),
    )?;
    write(
        &args.out.join("public_key.json"),
        &Envelope::public_key(&pk, &params).to_json(),
    )?;
    println!("wrote {}", args.out.display());
    Ok(ExitCode::SUCCESS)
}

fn cmd_encrypt(args: EncryptArgs) -> Result<ExitCode> {
    let env = read_envelope(&args.pk, Kind::PublicKey)?;
    let params = env.params()?;
    let pk = env.to_public_key(&params)?;
    let text = read(&args.input)?;
    let m = match serde_json::from_str::<Vec<i64>>(&text) {
        Ok(coeffs) => Plaintext::from_coeffs(&coeffs, &params)?,
        Err(array_err) => match Envelope::from_json(&text) {
            Ok(env) => env.to_plaintext(&params)?,
            Err(_) => {
                return Err(array_err).with_context(|| {
                    format!(
                        "{} is neither a coefficient array nor a plaintext file",
                        args.input.display()
                    )
                })
            }
        },
    };
    let (ct, _) = encrypt(&pk, &m, &params, &mut derive_rng(args.seed, 0))?;
    write(&args.out, &Envelope::ciphertext(&ct, &params).to_json())?;
    Ok(ExitCode::SUCCESS)
}

fn cmd_decrypt(args: DecryptArgs) -> Result<ExitCode> {
    let env = read_envelope(&args.sk, Kind::SecretKey)?;
    let params = env.params()?;
    let sk = env.to_secret_key(&params)?;
    let ct = read_envelope(&args.input, Kind::Ciphertext)?.to_ciphertext(&params)?;
    let m = decrypt(&sk, &ct, &params)?;
    if let Some(out) = &args.out {
        write(out, &Envelope::plaintext(&m, &params).to_json())?;
    }
    let len = m
        .coeffs()
        .iter()
        .rposition(|&c| c != 0)
        .map_or(0, |i| i + 1);
    println!("{}", serde_json::to_string(&m.coeffs()[..len])?);
    Ok(ExitCode::SUCCESS)
}

fn cmd_attack(args: AttackArgs) -> Result<ExitCode> {
    let choice = args
        .params
        .unwrap_or_else(|| ParamChoice::named(args.name.default_params()));
    if args.flood.is_some() && args.name != AttackName::Circuit {
        bail!("--flood only applies to the circuit attack");
    }
    if args.trials == 0 {
        bail!("--trials must be at least 1");
    }
    let (params, name, seed, trials) = (&choice.params, choice.name(), args.seed, args.trials);
    let start = Instant::now();
    let mut report: AttackReport = match args.name {
        AttackName::Cca => run_cca(params, name, seed, trials),
        AttackName::Bitleak => run_bitleak(params, name, seed, trials),
        AttackName::Circuit => run_circuit(params, name, seed, trials, args.flood)?,
        AttackName::Encoder => run_encoder(params, name, seed)?,
    };
    let elapsed = start.elapsed();
    if args.timing {
        report.elapsed_ms = Some(elapsed.as_millis() as u64);
    }
    let out = args
        .out
        .unwrap_or_else(|| PathBuf::from(format!("{}-report.json", args.name.label())));
    write(&out, &report.to_json())?;
    println!(
        "{}: {} ({}/{} trials, {} oracle calls), report in {}",
        report.attack,
        report.verdict,
        report.successes,
        report.trials,
        report.oracle_calls,
        out.display()
    );
    eprintln!("elapsed: {:.3} s", elapsed.as_secs_f64());
    Ok(ExitCode::from(report.verdict.exit_code() as u8))
}

fn cmd_psi(args: PsiArgs) -> Result<ExitCode> {
    let params = args.params.params;
    let strategy = match args.strategy {
        StrategyName::Honest => BobStrategy::Honest,
        StrategyName::Flooding => BobStrategy::Flooding {
            bound: 1u64
                .checked_shl(args.flood)
                .filter(|_| args.flood < 64)
                .context("--flood exponent too large")?,
        },
        StrategyName::MaliciousProbe => BobStrategy::MaliciousBitProbe {
            index: args
                .index
                .context("--index is required for malicious-probe")?,
        },
    };
    let alice = AliceInputs {
        m_a: args.a,
        keys: None,
        mode: if args.retain_witness {
            AliceMode::RetainWitness
        } else {
            AliceMode::Honest
        },
    };
    let bob = BobInputs {
        m_b: args.b,
        r: args.r,
    };
    let mut transcript = run_session(
        &params,
        alice,
        bob,
        strategy,
        &mut SessionRegistry::new(),
        &mut derive_rng(args.seed, 0),
    )?;
    transcript.params.name = args.params.name.clone();
    write(&args.out, &transcript.to_json())?;
    println!("{}", transcript.outcome);
    Ok(ExitCode::SUCCESS)
}

fn cmd_replay(args: ReplayArgs) -> Result<ExitCode> {
    let transcript = Transcript::from_json(&read(&args.input)?)
        .with_context(|| format!("{} is not a transcript", args.input.display()))?;
    let outcome = transcript.replay()?;
    println!("{outcome} (verified)");
    if let Some(witness) = transcript.witness()? {
        if matches!(transcript.strategy, BobStrategy::MaliciousBitProbe { .. }) {
            return Ok(ExitCode::SUCCESS);
        }
        let params = transcript.bfv_params()?;
        let recovered = circuit_privacy_recover(
            &transcript.secret_key()?,
            &transcript.public_key()?,
            &witness,
            &Plaintext::constant(transcript.audit.m_a, &params),
            &transcript.response()?,
            &params,
        );
        match recovered {
            Ok((r, m_b)) => println!("recovered r = {}, m_b = {}", r.coeffs()[0], m_b.coeffs()[0]),
            Err(e) => println!("recovery failed: {e}"),
        }
    }
    Ok(ExitCode::SUCCESS)
}
