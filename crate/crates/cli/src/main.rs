//! `metasheet`: command-line front end for templates, workbooks, validation
//! and the HTTP service.
//!
//! Exit status: 0 success (no issues), 1 issues found, 2 usage or parse
//! error, 3 I/O or backend error.

mod render;

use std::fs;
use std::io::{self, Read, Write};
use std::net::SocketAddr;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::anyhow;
use clap::{Args, Parser, Subcommand};
use metasheet_core::{
    apply_patches, generate_delimited_skeleton, generate_workbook, ingest, lint_template, link_template,
    parse_table, parse_template, render_spec_doc, resolve_template, serialize_delimited, validate_table,
    write_workbook, LinkError, Patch, RegisterOutcome, RegistryError, ResolvedTemplate, Separator, Table,
    TemplateRegistry, TemplateSelector, TermClient, TerminologySource,
};
use metasheet_service::{ServiceConfig, DEFAULT_PAYLOAD_LIMIT};

#[derive(Debug, Parser)]
#[command(name = "metasheet", version, about = "Template-driven metadata spreadsheets")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Check and register template documents.
    #[command(subcommand)]
    Template(TemplateCommand),
    /// Generate, validate and repair spreadsheets.
    #[command(subcommand)]
    Sheet(SheetCommand),
    /// Run the HTTP validation service.
    Serve(ServeArgs),
}

#[derive(Debug, Subcommand)]
enum TemplateCommand {
    /// Parse a template document and report lint warnings.
    Lint {
        file: PathBuf,
        #[arg(long)]
        json: bool,
    },
    /// Add a template document to a registry directory.
    Register {
        file: PathBuf,
        #[arg(long, env = "METASHEET_REGISTRY")]
        registry: PathBuf,
    },
}

#[derive(Debug, Args)]
struct Backends {
    /// Registry directory; the bundled templates are used when absent.
    #[arg(long, env = "METASHEET_REGISTRY", global = true)]
    registry: Option<PathBuf>,
    /// Value-set source: a directory or an http(s) base URL. Defaults to the
    /// bundled value sets.
    #[arg(long, env = "METASHEET_TERMS", global = true)]
    terms: Option<String>,
}

#[derive(Debug, Subcommand)]
enum SheetCommand {
    /// Write an empty workbook (or delimited skeleton) for a template.
    Generate {
        #[arg(long, value_name = "ID@VER")]
        template: TemplateSelector,
        #[arg(short, long, value_name = "OUT")]
        output: PathBuf,
        /// Write a tab-separated header skeleton instead of a workbook.
        #[arg(long)]
        tsv: bool,
        /// Also write a Markdown field reference to this path.
        #[arg(long, value_name = "PATH")]
        spec_doc: Option<PathBuf>,
        #[command(flatten)]
        backends: Backends,
    },
    /// Validate a populated workbook or delimited file ("-" reads stdin).
    Validate {
        file: PathBuf,
        #[arg(long, value_name = "ID@VER")]
        template: Option<TemplateSelector>,
        /// Print the report as JSON.
        #[arg(long)]
        json: bool,
        /// List repair suggestions under each issue.
        #[arg(long)]
        suggest: bool,
        #[arg(long, value_name = "tab|comma")]
        separator: Option<Separator>,
        #[command(flatten)]
        backends: Backends,
    },
    /// Apply a JSON array of {row, column, value} patches and revalidate.
    Repair {
        file: PathBuf,
        #[arg(long, value_name = "PATCHES.json")]
        patches: PathBuf,
        #[arg(short, long, value_name = "OUT")]
        output: PathBuf,
        #[arg(long, value_name = "ID@VER")]
        template: Option<TemplateSelector>,
        #[arg(long, value_name = "tab|comma")]
        separator: Option<Separator>,
        #[arg(long)]
        json: bool,
        #[command(flatten)]
        backends: Backends,
    },
}

#[derive(Debug, Args)]
struct ServeArgs {
    #[arg(long, default_value = "127.0.0.1:8080")]
    listen: SocketAddr,
    /// Registry directory; templates stay in memory when absent.
    #[arg(long, env = "METASHEET_REGISTRY")]
    registry: Option<PathBuf>,
    #[arg(long, env = "METASHEET_TERMS")]
    terms: Option<String>,
    /// Register the bundled templates at startup.
    #[arg(long)]
    seed_fixtures: bool,
    /// Allowed CORS origin; repeat for several. Any origin when omitted.
    #[arg(long = "cors-origin")]
    cors_origins: Vec<String>,
    #[arg(long, default_value_t = DEFAULT_PAYLOAD_LIMIT)]
    payload_limit: usize,
}

/// An error tagged with the exit status it maps to.
struct Failure {
    status: u8,
    error: anyhow::Error,
}

impl Failure {
    fn usage(error: impl Into<anyhow::Error>) -> Self {
        Self { status: 2, error: error.into() }
    }

    fn backend(error: impl Into<anyhow::Error>) -> Self {
        Self { status: 3, error: error.into() }
    }
}

impl From<LinkError> for Failure {
    fn from(e: LinkError) -> Self {
        match e {
            LinkError::Resolve(_) => Failure::backend(e),
            other => Failure::usage(other),
        }
    }
}

type CliResult<T = u8> = Result<T, Failure>;

fn main() -> ExitCode {
    let cli = Cli::parse();
    tracing_subscriber::fmt()
        .with_env_filter(
            tracing_subscriber::EnvFilter::try_from_default_env().unwrap_or_else(|_| "info".into()),
        )
        .with_writer(io::stderr)
        .init();
    match run(cli) {
        Ok(status) => ExitCode::from(status),
        Err(f) => {
            eprintln!("error: {:#}", f.error);
            ExitCode::from(f.status)
        }
    }
}

fn run(cli: Cli) -> CliResult {
    match cli.command {
        Command::Template(TemplateCommand::Lint { file, json }) => template_lint(&file, json),
        Command::Template(TemplateCommand::Register { file, registry }) => template_register(&file, &registry),
        Command::Sheet(SheetCommand::Generate { template, output, tsv, spec_doc, backends }) => {
            sheet_generate(&template, &output, tsv, spec_doc.as_deref(), &backends)
        }
        Command::Sheet(SheetCommand::Validate { file, template, json, suggest, separator, backends }) => {
            sheet_validate(&file, template.as_ref(), separator, json, suggest, &backends)
        }
        Command::Sheet(SheetCommand::Repair { file, patches, output, template, separator, json, backends }) => {
            sheet_repair(&file, &patches, &output, template.as_ref(), separator, json, &backends)
        }
        Command::Serve(args) => serve(args),
    }
}

fn read_input(path: &Path) -> CliResult<(Vec<u8>, Option<String>)> {
    if path == Path::new("-") {
        let mut buf = Vec::new();
        io::stdin()
            .read_to_end(&mut buf)
            .map_err(|e| Failure::backend(anyhow!("cannot read stdin: {e}")))?;
        return Ok((buf, None));
    }
    let bytes = fs::read(path).map_err(|e| Failure::backend(anyhow!("cannot read {}: {e}", path.display())))?;
    let name = path.file_name().map(|n| n.to_string_lossy().into_owned());
    Ok((bytes, name))
}

fn write_output(path: &Path, bytes: &[u8]) -> CliResult<()> {
    fs::write(path, bytes).map_err(|e| Failure::backend(anyhow!("cannot write {}: {e}", path.display())))
}

fn stdout(bytes: &[u8]) -> CliResult<()> {
    let mut out = io::stdout().lock();
    out.write_all(bytes)
        .and_then(|_| out.flush())
        .map_err(|e| Failure::backend(anyhow!("cannot write to stdout: {e}")))
}

fn open_registry(root: Option<&Path>) -> CliResult<TemplateRegistry> {
    match root {
        Some(root) => TemplateRegistry::open(root).map_err(Failure::backend),
        None => Ok(TemplateRegistry::with_fixtures()),
    }
}

fn term_client(src: Option<&str>) -> CliResult<TermClient> {
    match src {
        None => Ok(TermClient::builtin()),
        Some(src) => {
            let source = TerminologySource::parse(src)
                .map_err(|e| Failure::usage(anyhow!("invalid terminology source '{src}': {e}")))?;
            Ok(TermClient::new(&source))
        }
    }
}

fn template_lint(file: &Path, json: bool) -> CliResult {
    let (bytes, _) = read_input(file)?;
    let template = parse_template(&bytes).map_err(Failure::usage)?;
    template.check().map_err(Failure::usage)?;
    let findings = lint_template(&template);
    if json {
        let mut body = serde_json::to_vec(&findings).map_err(Failure::backend)?;
        body.push(b'\n');
        stdout(&body)?;
    } else {
        println!("{}@{}: {} warning(s)", template.id, template.version, findings.len());
        for f in &findings {
            println!("  {f}");
        }
    }
    Ok(0)
}

fn template_register(file: &Path, root: &Path) -> CliResult {
    let (bytes, _) = read_input(file)?;
    let template = parse_template(&bytes).map_err(Failure::usage)?;
    let label = format!("{}@{}", template.id, template.version);
    for f in lint_template(&template) {
        eprintln!("warning: {f}");
    }
    let registry = TemplateRegistry::open(root).map_err(Failure::backend)?;
    match registry.register(template) {
        Ok(RegisterOutcome::Created) => println!("registered {label}"),
        Ok(RegisterOutcome::Unchanged) => println!("{label} already registered, unchanged"),
        Err(e @ (RegistryError::Invalid(_) | RegistryError::Conflict { .. })) => return Err(Failure::usage(e)),
        Err(e) => return Err(Failure::backend(e)),
    }
    Ok(0)
}

fn resolve_selected(selector: &TemplateSelector, backends: &Backends) -> CliResult<ResolvedTemplate> {
    let registry = open_registry(backends.registry.as_deref())?;
    let template = registry
        .get(&selector.id, &selector.version)
        .ok_or_else(|| Failure::backend(anyhow!("template {selector} is not registered")))?;
    let terms = term_client(backends.terms.as_deref())?;
    resolve_template(&template, &terms).map_err(Failure::backend)
}

fn sheet_generate(
    selector: &TemplateSelector,
    output: &Path,
    tsv: bool,
    spec_doc: Option<&Path>,
    backends: &Backends,
) -> CliResult {
    let rt = resolve_selected(selector, backends)?;
    if tsv {
        write_output(output, generate_delimited_skeleton(&rt).as_bytes())?;
    } else {
        let workbook = generate_workbook(&rt).map_err(Failure::backend)?;
        write_output(output, &workbook.bytes)?;
    }
    if let Some(path) = spec_doc {
        write_output(path, render_spec_doc(&rt).as_bytes())?;
    }
    eprintln!("wrote {} for {selector}", output.display());
    Ok(0)
}

fn load_and_link(
    file: &Path,
    selector: Option<&TemplateSelector>,
    separator: Option<Separator>,
    backends: &Backends,
) -> CliResult<(Vec<u8>, Option<String>, Table, ResolvedTemplate)> {
    let (bytes, name) = read_input(file)?;
    let table = parse_table(&bytes, name.as_deref(), separator).map_err(Failure::usage)?;
    let registry = open_registry(backends.registry.as_deref())?;
    let terms = term_client(backends.terms.as_deref())?;
    let rt = link_template(&table, &registry, selector, &terms)?;
    Ok((bytes, name, table, rt))
}

fn sheet_validate(
    file: &Path,
    selector: Option<&TemplateSelector>,
    separator: Option<Separator>,
    json: bool,
    suggest: bool,
    backends: &Backends,
) -> CliResult {
    let (_, _, table, rt) = load_and_link(file, selector, separator, backends)?;
    let report = validate_table(&rt, &table);
    if json {
        stdout(&serde_json::to_vec(&report).map_err(Failure::backend)?)?;
    } else {
        let ranker = metasheet_core::TokenOverlapRanker;
        let text = render::report(&report, suggest.then_some((&rt, &ranker as &dyn metasheet_core::SemanticRanker)));
        stdout(text.as_bytes())?;
    }
    Ok(u8::from(!report.is_clean()))
}

fn sheet_repair(
    file: &Path,
    patches: &Path,
    output: &Path,
    selector: Option<&TemplateSelector>,
    separator: Option<Separator>,
    json: bool,
    backends: &Backends,
) -> CliResult {
    let (patch_bytes, _) = read_input(patches)?;
    let patches: Vec<Patch> = serde_json::from_slice(&patch_bytes)
        .map_err(|e| Failure::usage(anyhow!("malformed patch file {}: {e}", patches.display())))?;
    let (bytes, name, table, rt) = load_and_link(file, selector, separator, backends)?;
    let patched = apply_patches(&table, &patches).map_err(Failure::usage)?;
    let out = if ingest::is_workbook(&bytes) {
        write_workbook(&rt, &patched).map_err(Failure::backend)?
    } else {
        let sep = separator
            .or_else(|| name.as_deref().and_then(Separator::from_file_name))
            .unwrap_or(Separator::Tab);
        serialize_delimited(&patched, sep).into_bytes()
    };
    write_output(output, &out)?;
    let report = validate_table(&rt, &patched);
    if json {
        stdout(&serde_json::to_vec(&report).map_err(Failure::backend)?)?;
    } else {
        println!(
            "applied {} patch(es), wrote {}; {} issues in {} records",
            patches.len(),
            output.display(),
            report.issues.len(),
            report.summary.total_records
        );
    }
    Ok(0)
}

fn serve(args: ServeArgs) -> CliResult {
    let terms = match args.terms.as_deref() {
        Some(src) => TerminologySource::parse(src)
            .map_err(|e| Failure::usage(anyhow!("invalid terminology source '{src}': {e}")))?,
        None => ServiceConfig::default().terms,
    };
    let config = ServiceConfig {
        listen: args.listen,
        registry_root: args.registry,
        terms,
        payload_limit: args.payload_limit,
        cors_origins: args.cors_origins,
        seed_fixtures: args.seed_fixtures,
    };
    let runtime = tokio::runtime::Runtime::new().map_err(Failure::backend)?;
    runtime.block_on(metasheet_service::serve(config)).map_err(|e| match e {
        metasheet_service::ServiceError::Origin(_) => Failure::usage(e),
        other => Failure::backend(other),
    })?;
    Ok(0)
}
