//! C ABI over the expertquest text pipeline and fixture-backed search.
//!
//! Every fallible function returns an [`EqStatus`] and writes its result
//! through an out-pointer. On failure a message is available from
//! [`eq_last_error`] on the same thread. Objects are opaque handles released
//! with their matching `_free` function; strings returned by the library are
//! released with [`eq_string_free`].

use expertquest::search::SearchParams;
use expertquest::sources::fixture::FixtureError;
use expertquest::sources::{FixtureCorpus, SourceError, Sources};
use expertquest::textpipe::{self, hash_index, porter_stem, FeatureVector, TextPipeline, DEFAULT_VECTOR_SIZE};
use expertquest::{ExpertFinder, LanguageList, SearchError};
use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;
use std::sync::Arc;

/// Result codes shared by every fallible function.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EqStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    InvalidArgument = 3,
    NotFound = 4,
    SourceFailure = 5,
    RateLimited = 6,
    Io = 7,
    Panic = 8,
}

/// Hashed term-frequency vector.
pub struct EqFeatureVector {
    inner: FeatureVector,
}

/// Search engine over a fixture corpus and the built-in language list.
pub struct EqEngine {
    finder: ExpertFinder,
    vector_size: usize,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

struct Failure(EqStatus, String);

impl Failure {
    fn new(status: EqStatus, message: impl Into<String>) -> Self {
        Failure(status, message.into())
    }
}

impl From<SearchError> for Failure {
    fn from(e: SearchError) -> Self {
        let status = match (&e, e.source_error()) {
            (SearchError::InvalidArgument(_), _) => EqStatus::InvalidArgument,
            (_, Some(SourceError::RateLimited { .. })) => EqStatus::RateLimited,
            _ => EqStatus::SourceFailure,
        };
        Failure(status, e.to_string())
    }
}

fn set_last_error(message: &str) {
    let message = CString::new(message.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|slot| *slot.borrow_mut() = Some(message));
}

/// Run `f`, record any failure or panic, and return its status.
fn guard(f: impl FnOnce() -> Result<(), Failure>) -> EqStatus {
    LAST_ERROR.with(|slot| *slot.borrow_mut() = None);
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => EqStatus::Ok,
        Ok(Err(Failure(status, message))) => {
            set_last_error(&message);
            status
        }
        Err(_) => {
            set_last_error("internal panic");
            EqStatus::Panic
        }
    }
}

unsafe fn str_arg<'a>(ptr: *const c_char, name: &str) -> Result<&'a str, Failure> {
    if ptr.is_null() {
        return Err(Failure::new(EqStatus::NullPointer, format!("{name} is null")));
    }
    CStr::from_ptr(ptr).to_str().map_err(|_| Failure::new(EqStatus::InvalidUtf8, format!("{name} is not valid UTF-8")))
}

fn out_arg<'a, T>(ptr: *mut T, name: &str) -> Result<&'a mut T, Failure> {
    // SAFETY: non-null checked; the caller promises the pointer is writable.
    unsafe { ptr.as_mut() }.ok_or_else(|| Failure::new(EqStatus::NullPointer, format!("{name} is null")))
}

fn size_arg(size: usize) -> usize {
    if size == 0 {
        DEFAULT_VECTOR_SIZE
    } else {
        size
    }
}

fn into_c_string(s: String) -> Result<*mut c_char, Failure> {
    CString::new(s)
        .map(CString::into_raw)
        .map_err(|_| Failure::new(EqStatus::InvalidArgument, "result contains a NUL byte"))
}

/// Message for the last failed call on this thread, or NULL. The pointer stays
/// valid until the next library call on the same thread.
#[no_mangle]
pub extern "C" fn eq_last_error() -> *const c_char {
    LAST_ERROR.with(|slot| slot.borrow().as_ref().map_or(std::ptr::null(), |s| s.as_ptr()))
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn eq_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Default number of hash buckets; passing 0 as a size selects it.
#[no_mangle]
pub extern "C" fn eq_default_vector_size() -> usize {
    DEFAULT_VECTOR_SIZE
}

/// Vectorize UTF-8 `text` into `size` buckets (0 for the default).
///
/// # Safety
/// `text` must be a NUL-terminated string and `out` a writable pointer.
#[no_mangle]
pub unsafe extern "C" fn eq_vectorize(text: *const c_char, size: usize, out: *mut *mut EqFeatureVector) -> EqStatus {
    guard(|| {
        let out = out_arg(out, "out")?;
        let text = str_arg(text, "text")?;
        let inner = textpipe::vectorize(text, size_arg(size));
        *out = Box::into_raw(Box::new(EqFeatureVector { inner }));
        Ok(())
    })
}

/// Number of buckets in `vector`, or 0 when it is NULL.
///
/// # Safety
/// `vector` must be NULL or a live handle from [`eq_vectorize`].
#[no_mangle]
pub unsafe extern "C" fn eq_feature_vector_len(vector: *const EqFeatureVector) -> usize {
    vector.as_ref().map_or(0, |v| v.inner.size())
}

/// Pointer to the bucket counts, valid while `vector` is alive. NULL when `vector` is NULL.
///
/// # Safety
/// `vector` must be NULL or a live handle from [`eq_vectorize`].
#[no_mangle]
pub unsafe extern "C" fn eq_feature_vector_counts(vector: *const EqFeatureVector) -> *const u32 {
    vector.as_ref().map_or(std::ptr::null(), |v| v.inner.counts().as_ptr())
}

/// # Safety
/// `vector` must be NULL or a handle from [`eq_vectorize`] not yet freed.
#[no_mangle]
pub unsafe extern "C" fn eq_feature_vector_free(vector: *mut EqFeatureVector) {
    if !vector.is_null() {
        drop(Box::from_raw(vector));
    }
}

/// Cosine similarity of two vectors of the same size, in [0, 1].
///
/// # Safety
/// `a` and `b` must be live vector handles and `out` a writable pointer.
#[no_mangle]
pub unsafe extern "C" fn eq_cosine(a: *const EqFeatureVector, b: *const EqFeatureVector, out: *mut f64) -> EqStatus {
    guard(|| {
        let out = out_arg(out, "out")?;
        let a = a.as_ref().ok_or_else(|| Failure::new(EqStatus::NullPointer, "a is null"))?;
        let b = b.as_ref().ok_or_else(|| Failure::new(EqStatus::NullPointer, "b is null"))?;
        let sim = textpipe::cosine_similarity(&a.inner, &b.inner)
            .map_err(|e| Failure::new(EqStatus::InvalidArgument, e.to_string()))?;
        *out = sim.value();
        Ok(())
    })
}

/// Similarity of two texts through the full pipeline.
///
/// # Safety
/// `a` and `b` must be NUL-terminated strings and `out` a writable pointer.
#[no_mangle]
pub unsafe extern "C" fn eq_similarity(a: *const c_char, b: *const c_char, size: usize, out: *mut f64) -> EqStatus {
    guard(|| {
        let out = out_arg(out, "out")?;
        let (a, b) = (str_arg(a, "a")?, str_arg(b, "b")?);
        let pipeline =
            TextPipeline::new(size_arg(size)).map_err(|e| Failure::new(EqStatus::InvalidArgument, e.to_string()))?;
        *out = pipeline.similarity(a, b).value();
        Ok(())
    })
}

/// Bucket index of a single (already stemmed) word: CRC-32 modulo `size`.
///
/// # Safety
/// `word` must be a NUL-terminated string and `out` a writable pointer.
#[no_mangle]
pub unsafe extern "C" fn eq_hash_index(word: *const c_char, size: usize, out: *mut usize) -> EqStatus {
    guard(|| {
        let out = out_arg(out, "out")?;
        let word = str_arg(word, "word")?;
        if size == 0 {
            return Err(Failure::new(EqStatus::InvalidArgument, "size must be at least 1"));
        }
        *out = hash_index(word, size);
        Ok(())
    })
}

/// Porter stem of a lowercase word. Free the result with [`eq_string_free`].
///
/// # Safety
/// `word` must be a NUL-terminated string and `out` a writable pointer.
#[no_mangle]
pub unsafe extern "C" fn eq_stem(word: *const c_char, out: *mut *mut c_char) -> EqStatus {
    guard(|| {
        let out = out_arg(out, "out")?;
        *out = into_c_string(porter_stem(str_arg(word, "word")?))?;
        Ok(())
    })
}

/// Open a fixture corpus directory. `vector_size` 0 selects the default.
///
/// # Safety
/// `dir` must be a NUL-terminated string and `out` a writable pointer.
#[no_mangle]
pub unsafe extern "C" fn eq_engine_open_fixture(
    dir: *const c_char,
    vector_size: usize,
    out: *mut *mut EqEngine,
) -> EqStatus {
    guard(|| {
        let out = out_arg(out, "out")?;
        let dir = str_arg(dir, "dir")?;
        let corpus = FixtureCorpus::open(Path::new(dir)).map_err(|e| {
            let status = match e {
                FixtureError::MissingDir(_) => EqStatus::NotFound,
                _ => EqStatus::Io,
            };
            Failure::new(status, e.to_string())
        })?;
        let finder = ExpertFinder::new(Sources::from_fixture(Arc::new(corpus)), LanguageList::builtin());
        *out = Box::into_raw(Box::new(EqEngine { finder, vector_size: size_arg(vector_size) }));
        Ok(())
    })
}

/// Ranked candidates for `language` as a JSON array. Free the result with
/// [`eq_string_free`].
///
/// # Safety
/// `engine` must be a live handle, `language` a NUL-terminated string and
/// `out_json` a writable pointer.
#[no_mangle]
pub unsafe extern "C" fn eq_engine_search_json(
    engine: *const EqEngine,
    language: *const c_char,
    search_count: usize,
    timeline_count: usize,
    out_json: *mut *mut c_char,
) -> EqStatus {
    guard(|| {
        let out = out_arg(out_json, "out_json")?;
        let engine = engine.as_ref().ok_or_else(|| Failure::new(EqStatus::NullPointer, "engine is null"))?;
        let language = str_arg(language, "language")?;
        let entry = engine
            .finder
            .languages()
            .find(language)
            .cloned()
            .ok_or_else(|| Failure::new(EqStatus::NotFound, format!("unknown language {language:?}")))?;
        let params =
            SearchParams::new(entry).with_counts(search_count, timeline_count).with_vector_size(engine.vector_size);
        let found = engine.finder.find_experts(&params)?;
        let json = serde_json::to_string(&found).map_err(|e| Failure::new(EqStatus::Io, e.to_string()))?;
        *out = into_c_string(json)?;
        Ok(())
    })
}

/// # Safety
/// `engine` must be NULL or a handle from [`eq_engine_open_fixture`] not yet freed.
#[no_mangle]
pub unsafe extern "C" fn eq_engine_free(engine: *mut EqEngine) {
    if !engine.is_null() {
        drop(Box::from_raw(engine));
    }
}

/// # Safety
/// `s` must be NULL or a string returned by this library and not yet freed.
#[no_mangle]
pub unsafe extern "C" fn eq_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}
