use std::collections::HashSet;
use std::fs::{self, File};
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use rayon::prelude::*;

use spex::analysis::{terms, WindowConfig};
use spex::annotate::{annotate_long_text, annotators, AnnotatorConfig, AnnotatorSpec};
use spex::corpus_io::{
    filter_by_ids, load_annotations, load_collection, load_id_list, load_qrels, load_queries,
    write_annotations, write_qrels, write_tsv, Document, EntityAnnotationSet, Qrels,
};
use spex::eval::{
    derive_qrels_duo, derive_qrels_top1, evaluate, load_scores, paired_t_test_results,
    parse_metric, pool_runs, recall_curve, write_curve_table, write_eval, write_pool,
    DEFAULT_CUTOFFS, DUO_DEPTH,
};
use spex::expand::{expand_text, ExpansionForm, ExpansionPolicy, Multiplicity};
use spex::index::{build_index, load_index, save_index};
use spex::runs::{
    combiners, load_assignment, load_run, save_run, selector_labels, write_labels, write_run,
    CombinerContext, RrfParams, Run,
};
use spex::search::{retrievers, search_run, Bm25Params, PrfParams, SearchConfig};

use crate::config::Config;
use crate::*;

pub fn dispatch(command: Command, cfg: &Config) -> Result<()> {
    match command {
        Command::Annotate(a) => annotate(a, cfg),
        Command::Expand(a) => expand(a, cfg),
        Command::Index(a) => index(a),
        Command::Search(a) => search(a, cfg),
        Command::Fuse(a) => fuse(a, cfg),
        Command::Oracle(a) => oracle(a),
        Command::Labels(a) => labels(a),
        Command::Select(a) => select(a),
        Command::Eval(a) => eval(a),
        Command::Curve(a) => curve(a),
        Command::Ttest(a) => ttest(a),
        Command::Pool(a) => pool(a),
        Command::QrelsTop1(a) => qrels_top1(a),
        Command::QrelsDuo(a) => qrels_duo(a, cfg),
        Command::Filter(a) => filter(a),
        Command::Stats(a) => stats(a),
    }
}

/// Buffered output to a file, or to stdout when no path is given.
fn output(path: Option<&Path>) -> Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(
            File::create(p).with_context(|| format!("creating {}", p.display()))?,
        )),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn load_runs(paths: &[PathBuf]) -> Result<Vec<Run>> {
    paths
        .iter()
        .map(|p| load_run(p).with_context(|| format!("reading run {}", p.display())))
        .collect()
}

fn qrels_from(path: &Path) -> Result<Qrels> {
    let loaded = load_qrels(path).with_context(|| format!("reading qrels {}", path.display()))?;
    if loaded.duplicates > 0 {
        log::warn!(
            "{}: {} duplicate judgments, last one kept",
            path.display(),
            loaded.duplicates
        );
    }
    Ok(loaded.qrels)
}

fn read_docs(path: &Path, header: bool) -> Result<Vec<Document>> {
    load_collection(path, header)?
        .collect::<spex::Result<Vec<_>>>()
        .with_context(|| format!("reading {}", path.display()))
}

fn annotate(a: AnnotateArgs, cfg: &Config) -> Result<()> {
    let window = WindowConfig::new(
        cfg.pick(a.window, "window_size", WindowConfig::default().window_size)?,
        cfg.pick(a.overlap, "overlap", WindowConfig::default().overlap)?,
    )?;
    let defaults = AnnotatorConfig::default();
    let spec = AnnotatorSpec {
        resource: Some(a.gazetteer.clone()),
        config: AnnotatorConfig {
            threshold: cfg.pick(a.threshold, "threshold", defaults.threshold)?,
            num_cand_mentions: cfg.pick(
                a.num_cand_mentions,
                "num_cand_mentions",
                defaults.num_cand_mentions,
            )?,
            num_cand_entities: cfg.pick(
                a.num_cand_entities,
                "num_cand_entities",
                defaults.num_cand_entities,
            )?,
        },
    };
    let name: String = cfg.pick(a.annotator, "annotator", "gazetteer".to_string())?;
    let annotator = (annotators().get(&name)?)(&spec)?;

    let docs = read_docs(&a.input, a.header)?;
    let sets: Vec<EntityAnnotationSet> = docs
        .par_iter()
        .map(|d| {
            annotate_long_text(&d.text, annotator.as_ref(), &window)
                .map(|ann| ann.into_annotation_set(d.id.clone()))
                .with_context(|| format!("annotating {}", d.id))
        })
        .collect::<Result<_>>()?;
    write_annotations(output(Some(&a.out))?, &sets)?;

    let mut meta = a.out.into_os_string();
    meta.push(".meta");
    spec.config
        .write_meta(output(Some(Path::new(&meta)))?, &window)?;
    log::info!("annotated {} texts", sets.len());
    Ok(())
}

fn expand(a: ExpandArgs, cfg: &Config) -> Result<()> {
    let form: ExpansionForm = cfg.pick(
        a.form.as_deref().map(str::parse).transpose()?,
        "form",
        ExpansionForm::Explicit,
    )?;
    let multiplicity: Multiplicity = cfg.pick(
        a.multiplicity.as_deref().map(str::parse).transpose()?,
        "multiplicity",
        Multiplicity::Single,
    )?;
    let policy = ExpansionPolicy::new(form, multiplicity)?;
    let annotations = load_annotations(&a.annotations)
        .with_context(|| format!("reading {}", a.annotations.display()))?;
    let docs = read_docs(&a.input, a.header)?;
    let rendered: Vec<String> = docs
        .par_iter()
        .map(|d| match annotations.get(&d.id) {
            Some(set) => expand_text(&d.text, &set.unique_links(), &set.mention_counts(), &policy)
                .map(|e| e.rendered)
                .with_context(|| format!("expanding {}", d.id)),
            None => Ok(d.text.clone()),
        })
        .collect::<Result<_>>()?;
    write_tsv(
        output(a.out.as_deref())?,
        docs.iter()
            .zip(&rendered)
            .map(|(d, t)| (d.id.as_str(), t.as_str())),
    )?;
    Ok(())
}

fn index(a: IndexArgs) -> Result<()> {
    let docs = read_docs(&a.collection, a.header)?;
    let index = build_index(docs, terms)?;
    save_index(&index, &a.out)?;
    log::info!(
        "indexed {} documents, {} terms",
        index.doc_count(),
        index.vocabulary_size()
    );
    Ok(())
}

fn search(a: SearchArgs, cfg: &Config) -> Result<()> {
    let d = Bm25Params::default();
    let p = PrfParams::default();
    let config = SearchConfig {
        bm25: Bm25Params {
            k1: cfg.pick(a.k1, "k1", d.k1)?,
            b: cfg.pick(a.b, "b", d.b)?,
            idf_floor_zero: cfg.switch(a.idf_floor0, "idf_floor0")?,
        },
        prf: PrfParams {
            top_docs: cfg.pick(a.prf_docs, "prf_docs", p.top_docs)?,
            expansion_terms: cfg.pick(a.prf_terms, "prf_terms", p.expansion_terms)?,
        },
    };
    let use_prf = cfg.switch(a.prf, "prf")?;
    if !use_prf && (a.prf_docs.is_some() || a.prf_terms.is_some()) {
        bail!(UsageError("--prf-docs/--prf-terms need --prf".into()));
    }
    let topk = cfg.pick(a.topk, "topk", 1000usize)?;
    let retriever = (retrievers().get(if use_prf { "bm25-prf" } else { "bm25" })?)(&config)?;
    let index = load_index(&a.index)?;
    let queries = load_queries(&a.queries)?;
    let run = search_run(&index, &queries, retriever.as_ref(), topk, &a.tag)?;
    write_run(output(a.out.as_deref())?, &run)?;
    Ok(())
}

fn combine(name: &str, ctx: &CombinerContext, runs: &[Run], out: Option<&Path>) -> Result<()> {
    let combiner = (combiners().get(name)?)(ctx)?;
    let run = combiner.combine(runs)?;
    write_run(output(out)?, &run)?;
    Ok(())
}

fn fuse(a: FuseArgs, cfg: &Config) -> Result<()> {
    let d = RrfParams::default();
    let ctx = CombinerContext {
        rrf: RrfParams {
            k_constant: cfg.pick(a.k, "rrf_k", d.k_constant)?,
            depth: cfg.pick(a.depth, "depth", d.depth)?,
        },
        ..Default::default()
    };
    combine("rrf", &ctx, &load_runs(&a.runs)?, a.out.as_deref())
}

fn oracle(a: OracleArgs) -> Result<()> {
    let ctx = CombinerContext {
        qrels: Some(qrels_from(&a.qrels)?),
        ..Default::default()
    };
    combine("oracle", &ctx, &load_runs(&a.runs)?, a.out.as_deref())
}

fn select(a: SelectArgs) -> Result<()> {
    let ctx = CombinerContext {
        assignment: Some(load_assignment(&a.assignment)?),
        ..Default::default()
    };
    combine("select", &ctx, &load_runs(&a.runs)?, a.out.as_deref())
}

fn labels(a: LabelsArgs) -> Result<()> {
    let labels = selector_labels(&load_runs(&a.runs)?, &qrels_from(&a.qrels)?)?;
    write_labels(output(a.out.as_deref())?, &labels)?;
    Ok(())
}

fn eval(a: EvalArgs) -> Result<()> {
    let metrics = a
        .metrics
        .iter()
        .map(|m| parse_metric(m))
        .collect::<spex::Result<Vec<_>>>()?;
    let run = load_run(&a.run)?;
    let qrels = qrels_from(&a.qrels)?;
    let mut out = output(None)?;
    for metric in &metrics {
        let result = evaluate(&run, &qrels, metric.as_ref());
        if result.skipped > 0 {
            log::info!("{}: {} queries skipped", result.metric, result.skipped);
        }
        write_eval(&mut out, &result, a.per_query)?;
    }
    Ok(())
}

fn curve(a: CurveArgs) -> Result<()> {
    let cutoffs = a.cutoffs.unwrap_or_else(|| DEFAULT_CUTOFFS.to_vec());
    let qrels = qrels_from(&a.qrels)?;
    let curves = load_runs(&a.runs)?
        .iter()
        .map(|r| Ok((r.tag().to_string(), recall_curve(r, &qrels, &cutoffs)?)))
        .collect::<spex::Result<Vec<_>>>()?;
    write_curve_table(output(a.out.as_deref())?, &curves)?;
    Ok(())
}

fn ttest(a: TtestArgs) -> Result<()> {
    let metric = parse_metric(&a.metric)?;
    let qrels = qrels_from(&a.qrels)?;
    let ra = evaluate(&load_run(&a.a)?, &qrels, metric.as_ref());
    let rb = evaluate(&load_run(&a.b)?, &qrels, metric.as_ref());
    let t = paired_t_test_results(&ra, &rb)?;
    let mut out = output(None)?;
    writeln!(out, "metric\t{}", ra.metric)?;
    writeln!(out, "mean_a\t{:.4}", ra.mean)?;
    writeln!(out, "mean_b\t{:.4}", rb.mean)?;
    writeln!(out, "n\t{}", t.n)?;
    writeln!(out, "t\t{:.4}", t.t)?;
    writeln!(out, "p\t{:.4}", t.p_two_sided)?;
    out.flush()?;
    Ok(())
}

fn pool(a: PoolArgs) -> Result<()> {
    let runs = load_runs(&a.runs)?;
    write_pool(output(a.out.as_deref())?, &pool_runs(&runs)?, &runs)?;
    Ok(())
}

fn qrels_top1(a: QrelsTop1Args) -> Result<()> {
    let qrels = derive_qrels_top1(&load_scores(&a.scores)?);
    write_qrels(output(a.out.as_deref())?, &qrels)?;
    Ok(())
}

fn qrels_duo(a: QrelsDuoArgs, cfg: &Config) -> Result<()> {
    let depth = cfg.pick(a.depth, "depth", DUO_DEPTH)?;
    let result = derive_qrels_duo(&load_scores(&a.stage1)?, &load_scores(&a.stage2)?, depth);
    let qrels = match result {
        Err(spex::Error::Coverage(missing)) => {
            for (q, d) in missing.iter().take(20) {
                eprintln!("missing stage-2 score: {q} {d}");
            }
            bail!("{} stage-1 candidates have no stage-2 score", missing.len());
        }
        other => other?,
    };
    write_qrels(output(a.out.as_deref())?, &qrels)?;
    Ok(())
}

fn file_name(path: &Path) -> Result<&std::ffi::OsStr> {
    path.file_name()
        .with_context(|| format!("{} has no file name", path.display()))
}

fn filter(a: FilterArgs) -> Result<()> {
    let ids: HashSet<String> = load_id_list(&a.ids)?.into_iter().collect();
    let queries = a
        .queries
        .as_deref()
        .map(load_queries)
        .transpose()?
        .unwrap_or_default();
    let qrels = a
        .qrels
        .as_deref()
        .map(qrels_from)
        .transpose()?
        .unwrap_or_default();
    let runs = load_runs(&a.runs)?;
    let kept = filter_by_ids(&queries, &qrels, &runs, &ids)?;

    fs::create_dir_all(&a.out_dir).with_context(|| format!("creating {}", a.out_dir.display()))?;
    if let Some(p) = &a.queries {
        write_tsv(
            output(Some(&a.out_dir.join(file_name(p)?)))?,
            kept.queries
                .iter()
                .map(|q| (q.id.as_str(), q.text.as_str())),
        )?;
    }
    if let Some(p) = &a.qrels {
        write_qrels(output(Some(&a.out_dir.join(file_name(p)?)))?, &kept.qrels)?;
    }
    for (p, run) in a.runs.iter().zip(&kept.runs) {
        save_run(run, &a.out_dir.join(file_name(p)?))?;
    }
    for id in &kept.missing {
        eprintln!("not found: {id}");
    }
    Ok(())
}

fn stats(a: StatsArgs) -> Result<()> {
    let index = load_index(&a.index)?;
    let mut out = output(None)?;
    writeln!(out, "documents\t{}", index.doc_count())?;
    writeln!(out, "terms\t{}", index.vocabulary_size())?;
    writeln!(out, "avg_doc_length\t{:.4}", index.avg_doc_length())?;
    out.flush()?;
    Ok(())
}
