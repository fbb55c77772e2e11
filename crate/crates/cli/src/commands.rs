use std::fs::File;
use std::io::{self, Write};
use std::net::{IpAddr, SocketAddr};
use std::path::Path;

use anyhow::{bail, Context, Result};
use mastite_core::{
    classify_quartet, concordance_report, export_report, import_csv, AnimalId, HealthStatus,
    ListFilter, ReadingDate, ReadingStore, ReportFormat, SqliteStore, StoreError, TeatQuartet,
    ThresholdTable,
};
use mastite_service::{DiagnosisResponse, Service, ServiceConfig};

use crate::GlobalOpts;

pub fn status_exit_code(status: HealthStatus) -> u8 {
    match status {
        HealthStatus::Healthy => 0,
        HealthStatus::Attention => 2,
        HealthStatus::Sick => 3,
        HealthStatus::Indeterminate => 4,
    }
}

fn open_store(g: &GlobalOpts) -> Result<SqliteStore> {
    let Some(path) = &g.store else {
        bail!("--store is required (or set MASTITE_STORE)");
    };
    SqliteStore::open(path).with_context(|| format!("opening store {}", path.display()))
}

fn print_json(value: &impl serde::Serialize) -> Result<()> {
    let mut out = io::stdout().lock();
    serde_json::to_writer_pretty(&mut out, value)?;
    writeln!(out)?;
    Ok(())
}

pub fn serve(g: &GlobalOpts, host: IpAddr, port: u16, legacy_strict: bool) -> Result<u8> {
    let Some(store_path) = &g.store else {
        bail!("--store is required (or set MASTITE_STORE)");
    };
    let config = ServiceConfig {
        bind: SocketAddr::new(host, port),
        store_path: store_path.clone(),
        legacy_strict,
        thresholds: ThresholdTable::default(),
    };
    let rt = tokio::runtime::Runtime::new().context("starting runtime")?;
    rt.block_on(async {
        let service = Service::bind(&config).await?;
        let addr = service.local_addr()?;
        tracing::info!(%addr, store = %config.store_path.display(), "listening");
        service.run(mastite_service::shutdown_signal()).await?;
        Ok(0)
    })
}

pub fn classify(g: &GlobalOpts, teats: &[f64]) -> Result<u8> {
    let values: [f64; 4] = teats
        .try_into()
        .context("exactly four teat temperatures are required")?;
    let quartet = TeatQuartet::from_values(values)?;
    let status = classify_quartet(&quartet, g.mode, &ThresholdTable::default());
    match g.format {
        ReportFormat::Text => println!("{status}"),
        ReportFormat::Json => print_json(&serde_json::json!({
            "teats": values,
            "mode": g.mode,
            "status": status,
        }))?,
    }
    Ok(status_exit_code(status))
}

pub fn import(g: &GlobalOpts, csv: &Path) -> Result<u8> {
    let file = File::open(csv).with_context(|| format!("opening {}", csv.display()))?;
    let store = open_store(g)?;
    let summary = import_csv(io::BufReader::new(file), &store)?;
    for e in &summary.rejected {
        eprintln!("{}:{}: {}", csv.display(), e.line, e.reason);
    }
    match g.format {
        ReportFormat::Text => println!(
            "inserted {}, rejected {}",
            summary.inserted,
            summary.rejected.len()
        ),
        ReportFormat::Json => print_json(&summary)?,
    }
    Ok(if summary.rejected.is_empty() { 0 } else { 1 })
}

pub fn report(g: &GlobalOpts) -> Result<u8> {
    let store = open_store(g)?;
    let records = store.list(&ListFilter::default())?;
    let report = concordance_report(&records, g.mode, &ThresholdTable::default());
    export_report(&report, g.format, io::stdout().lock())?;
    Ok(0)
}

pub fn last(g: &GlobalOpts) -> Result<u8> {
    let store = open_store(g)?;
    let record = match store.last_record() {
        Ok(r) => r,
        Err(StoreError::Empty) => bail!("store empty"),
        Err(e) => return Err(e.into()),
    };
    let d = DiagnosisResponse::from_record(&record, &ThresholdTable::default());
    match g.format {
        ReportFormat::Json => print_json(&d)?,
        ReportFormat::Text => {
            let teats = d.teats.map(|t| t.to_string()).join(" ");
            println!(
                "record {}: animal {}, date {}",
                d.record_id,
                d.animal_id,
                record.reading_date.to_dmy()
            );
            println!("teats: {teats}");
            println!("cup test: {}", if d.cup_test { "yes" } else { "no" });
            println!("status (paper-faithful): {}", d.status_paper_faithful);
            println!("status (worst-teat): {}", d.status_worst_teat);
        }
    }
    Ok(0)
}

pub fn list(
    g: &GlobalOpts,
    animal: Option<u32>,
    from: Option<ReadingDate>,
    to: Option<ReadingDate>,
) -> Result<u8> {
    let animal = animal.map(AnimalId::new).transpose()?;
    let store = open_store(g)?;
    let records = store.list(&ListFilter { animal, from, to })?;
    let th = ThresholdTable::default();
    match g.format {
        ReportFormat::Json => {
            let rows: Vec<_> = records
                .iter()
                .map(|r| DiagnosisResponse::from_record(r, &th))
                .collect();
            print_json(&rows)?;
        }
        ReportFormat::Text => {
            let mut out = io::stdout().lock();
            for r in &records {
                let teats = r.teats.values().map(|t| t.to_string()).join(" ");
                writeln!(
                    out,
                    "{}\tanimal {}\t{}\t{}\tcup test {}\t{}",
                    r.record_id,
                    r.id_animal,
                    r.reading_date.to_dmy(),
                    teats,
                    if r.is_mastite { "yes" } else { "no" },
                    classify_quartet(&r.teats, g.mode, &th),
                )?;
            }
        }
    }
    Ok(0)
}
