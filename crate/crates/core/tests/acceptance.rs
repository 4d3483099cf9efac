//! Acceptance checks. Prints one PASS/FAIL line per criterion and exits
//! non-zero if any fails.

mod common;

use common::stub::{Reply, Stub};
use common::*;
use expertquest::eval::{read_count_rows, replay_run};
use expertquest::service::{router, SearchResponse, ServiceConfig};
use expertquest::sources::{FakeClock, LiveConfig, LiveSources, MicroblogSource, SourceError};
use expertquest::textpipe::{hash_index, preprocess, vectorize, TextPipeline};
use expertquest::{cosine_similarity, CandidateProfile, LanguageList};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use std::collections::{HashMap, HashSet};
use std::path::Path;
use std::process::ExitCode;
use std::sync::Arc;
use std::time::{Duration, Instant};

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn check(cond: bool, detail: impl Into<String>) -> Outcome {
    if cond {
        Ok(detail.into())
    } else {
        Err(detail.into())
    }
}

fn table_pairs() -> Outcome {
    let pairs = [
        ("white dog", "black dog", 1.00),
        ("run jump play hide", "run jump play seek", 0.75),
        ("running dog", "running and barking dog", 0.82),
        ("runner jump", "running jump", 0.50),
        ("the mouse ran up the clock", "the elephant ran over the clock", 0.67),
        ("the mouse ran up the clock", "the clock ran over the mouse", 1.00),
    ];
    let started = Instant::now();
    let pipeline = TextPipeline::new(256).map_err(|e| e.to_string())?;
    let got: Vec<f64> = pairs.iter().map(|(a, b, _)| pipeline.similarity(a, b).value()).collect();
    let elapsed = started.elapsed();
    let ok = pairs.iter().zip(&got).all(|((_, _, want), got)| (got - want).abs() <= 0.01);
    let shown: Vec<String> = got.iter().map(|v| format!("{v:.4}")).collect();
    check(ok && elapsed < Duration::from_secs(1), format!("[{}] in {elapsed:?}", shown.join(", ")))
}

fn recorded_averages() -> Outcome {
    let published = [
        (10, 5, "run1.csv", 0.158265948, 0.052830189),
        (30, 15, "run2.csv", 0.171069182, 0.020754717),
        (50, 25, "run3.csv", 0.20215256, 0.050943396),
    ];
    let languages = LanguageList::builtin();
    let mut worst: f64 = 0.0;
    for (s, t, file, p, r) in published {
        let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("data/recorded").join(file);
        let rows = read_count_rows(std::fs::File::open(path).map_err(|e| e.to_string())?).map_err(|e| e.to_string())?;
        let summary = replay_run(&languages, &rows, s, t).map_err(|e| e.to_string())?;
        worst = worst.max((summary.average_precision - p).abs()).max((summary.average_recall - r).abs());
    }
    check(worst < 5e-6, format!("max deviation {worst:.2e} over 6 averages"))
}

fn crc32_bitwise(data: &[u8]) -> u32 {
    let mut crc = 0xFFFF_FFFFu32;
    for &byte in data {
        crc ^= u32::from(byte);
        for _ in 0..8 {
            crc = (crc >> 1) ^ (0xEDB8_8320 & (crc & 1).wrapping_neg());
        }
    }
    !crc
}

fn hash_determinism() -> Outcome {
    let oracle = crc32_bitwise(b"123456789");
    let ours = hash_index("123456789", 1usize << 32) as u32;
    let words = ["dog", "clojur", "program", "languag", "mous"];
    let agree = words.iter().all(|w| hash_index(w, 1usize << 32) as u32 == crc32_bitwise(w.as_bytes()));
    // Frozen bucket indices at the default size.
    let frozen = [hash_index("dog", 256), hash_index("mous", 256), hash_index("clock", 256)];
    let expected = [
        (crc32_bitwise(b"dog") % 256) as usize,
        (crc32_bitwise(b"mous") % 256) as usize,
        (crc32_bitwise(b"clock") % 256) as usize,
    ];
    check(
        oracle == 0xCBF4_3926 && ours == oracle && agree && frozen == expected,
        format!("crc32(\"123456789\") = {ours:#010X}, oracle {oracle:#010X}"),
    )
}

fn bag_cosine(a: &[String], b: &[String]) -> f64 {
    fn count(tokens: &[String]) -> HashMap<&str, f64> {
        let mut m = HashMap::new();
        for t in tokens {
            *m.entry(t.as_str()).or_default() += 1.0;
        }
        m
    }
    let (ma, mb) = (count(a), count(b));
    let dot: f64 = ma.iter().map(|(k, v)| v * mb.get(k).copied().unwrap_or(0.0)).sum();
    let norm = |m: &HashMap<&str, f64>| m.values().map(|v| v * v).sum::<f64>().sqrt();
    let (na, nb) = (norm(&ma), norm(&mb));
    if na == 0.0 || nb == 0.0 {
        0.0
    } else {
        dot / (na * nb)
    }
}

fn vocabulary() -> Vec<&'static str> {
    include_str!("data/porter_original.tsv").lines().map(|l| l.split_once('\t').unwrap().0).collect()
}

fn oracle_equivalence() -> Outcome {
    let vocab = vocabulary();
    let mut rng = rand::rngs::StdRng::seed_from_u64(2015);
    let (mut accepted, mut rejected, mut worst) = (0, 0, 0.0f64);
    while accepted < 100 {
        let pool: Vec<&str> = vocab.choose_multiple(&mut rng, 12).copied().collect();
        let mut text = || {
            let n = rng.gen_range(1..30);
            (0..n).map(|_| *pool.choose(&mut rng).unwrap()).collect::<Vec<_>>().join(" ")
        };
        let (a, b) = (text(), text());
        let (ta, tb) = (preprocess(&a), preprocess(&b));
        let distinct: HashSet<&String> = ta.iter().chain(&tb).collect();
        let buckets: HashSet<usize> = distinct.iter().map(|t| hash_index(t, 256)).collect();
        if distinct.len() > 20 || buckets.len() != distinct.len() {
            rejected += 1;
            continue;
        }
        accepted += 1;
        let hashed = cosine_similarity(&vectorize(&a, 256), &vectorize(&b, 256)).map_err(|e| e.to_string())?.value();
        worst = worst.max((hashed - bag_cosine(&ta, &tb)).abs());
    }
    check(worst <= 1e-9, format!("100 texts ({rejected} colliding draws skipped), max deviation {worst:.2e}"))
}

fn fixture_end_to_end() -> Outcome {
    let languages = ["Clojure", "Scala", "Python"];
    for parallelism in [1, 4] {
        let finder = finder(demo_corpus(), parallelism);
        for language in languages {
            let params = finder.params_for(language).map_err(|e| e.to_string())?;
            let found = finder.find_experts(&params).map_err(|e| e.to_string())?;
            if render(&found) != expected(language) {
                return Err(format!("{language} differs at parallelism {parallelism}"));
            }
        }
    }

    let runtime = tokio::runtime::Builder::new_multi_thread().worker_threads(4).enable_all().build().unwrap();
    let app = router(Arc::new(finder(demo_corpus(), 4)), ServiceConfig::default());
    for language in languages {
        let wanted: Vec<CandidateProfile> = serde_json::from_str(&expected(language)).unwrap();
        let wanted = serde_json::to_vec(&SearchResponse::new(language, Duration::ZERO, &wanted).results).unwrap();
        let bodies = runtime.block_on(async {
            use http_body_util::BodyExt;
            use tower::ServiceExt;
            let tasks: Vec<_> = (0..8)
                .map(|_| {
                    let app = app.clone();
                    let body = serde_json::json!({ "language": language }).to_string();
                    tokio::spawn(async move {
                        let req = axum::http::Request::post("/api/search").body(axum::body::Body::from(body)).unwrap();
                        let resp = app.oneshot(req).await.unwrap();
                        resp.into_body().collect().await.unwrap().to_bytes()
                    })
                })
                .collect();
            let mut out = Vec::new();
            for t in tasks {
                out.push(t.await.unwrap());
            }
            out
        });
        for body in bodies {
            let resp: SearchResponse = serde_json::from_slice(&body).map_err(|e| e.to_string())?;
            if serde_json::to_vec(&resp.results).unwrap() != wanted {
                return Err(format!("{language} differs under concurrent service requests"));
            }
        }
    }
    Ok("3 demo languages: serial, parallelism 4, 8 concurrent requests".into())
}

fn ranking_property() -> Outcome {
    let mut rng = rand::rngs::StdRng::seed_from_u64(1000);
    for i in 0..1000 {
        let n = rng.gen_range(0..16);
        let candidates = random_candidates(&mut rng, n);
        let ranked = expertquest::search::rank(candidates.clone());
        if ranked != oracle_rank(&candidates) {
            return Err(format!("set {i} differs from oracle"));
        }
        let mut shuffled = candidates;
        shuffled.shuffle(&mut rng);
        if expertquest::search::rank(shuffled) != ranked {
            return Err(format!("set {i} depends on input order"));
        }
    }
    Ok("1000 random sets match the brute-force oracle and are order-independent".into())
}

fn performance() -> Outcome {
    let vocab = vocabulary();
    let mut rng = rand::rngs::StdRng::seed_from_u64(105);
    let mut text = String::new();
    for i in 0..105_000 {
        text.push_str(vocab.choose(&mut rng).unwrap());
        text.push_str(if i % 17 == 16 { ". " } else { " " });
    }
    let started = Instant::now();
    let vector = vectorize(&text, 256);
    let elapsed = started.elapsed();
    check(
        elapsed < Duration::from_secs(5) && vector.total() > 0,
        format!("105000 words, {} tokens kept, {elapsed:?}", vector.total()),
    )
}

fn no_network() -> Outcome {
    let clock = Arc::new(FakeClock::new());
    let stub = Stub::start(clock.clone(), |_, i| match i {
        0 => Reply::json(429, "{}").header("retry-after", "5"),
        1 | 2 => Reply::json(503, "{}"),
        _ => Reply::json(200, r#"{"statuses": []}"#),
    });
    let base = url::Url::parse(&stub.base).unwrap();
    let config = LiveConfig { twitter_url: base, twitter_bearer: Some("t".into()), ..LiveConfig::default() };
    let twitter = LiveSources::new(config, clock.clone()).map_err(|e| e.to_string())?.twitter();
    let posts = twitter.search_posts("Go github", 5).map_err(|e| e.to_string())?;
    let sleeps = clock.sleeps();
    let times: Vec<Duration> = stub.requests().iter().map(|r| r.at).collect();
    let secs = |v: &[u64]| v.iter().map(|&s| Duration::from_secs(s)).collect::<Vec<_>>();

    let clock = Arc::new(FakeClock::new());
    let stub = Stub::start(clock.clone(), |_, _| Reply::json(429, "{}"));
    let base = url::Url::parse(&stub.base).unwrap();
    let config = LiveConfig { twitter_url: base, twitter_bearer: Some("t".into()), ..LiveConfig::default() };
    let exhausted = LiveSources::new(config, clock.clone()).unwrap().twitter().search_posts("Go github", 5);

    check(
        posts.is_empty()
            && sleeps == secs(&[5, 2, 4])
            && times == secs(&[0, 5, 7, 11])
            && matches!(exhausted, Err(SourceError::RateLimited { .. }))
            && clock.sleeps() == secs(&[1, 2, 4]),
        format!("stub on {}, fake-clock sleeps {sleeps:?}", stub.base),
    )
}

fn main() -> ExitCode {
    let criteria: [Criterion; 8] = [
        ("example string pairs", table_pairs),
        ("recorded-run averages", recorded_averages),
        ("hash determinism", hash_determinism),
        ("oracle equivalence", oracle_equivalence),
        ("fixture end-to-end determinism", fixture_end_to_end),
        ("ranking property suite", ranking_property),
        ("performance", performance),
        ("no-network live backends", no_network),
    ];
    let mut failed = 0;
    for (name, run) in criteria {
        match run() {
            Ok(detail) => println!("PASS  {name}: {detail}"),
            Err(detail) => {
                failed += 1;
                println!("FAIL  {name}: {detail}");
            }
        }
    }
    println!("{} of {} acceptance criteria passed", 8 - failed, 8);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
