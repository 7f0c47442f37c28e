//! Answer HTTP API requests in-process. Pass `--listen` to serve on
//! 127.0.0.1:8080 instead.
//!
//!     cargo run --example serve
//!     cargo run --example serve -- --listen

use stepml::cli::{Server, Session};
use stepml::eval::{ScriptedInput, DEFAULT_MAX_STEPS};

fn main() -> std::io::Result<()> {
    let source = "let rec factorial n = if n = 1 then 1 else n * factorial (n - 1) in factorial 4";
    let session = Session::new(source, &mut ScriptedInput::empty(), DEFAULT_MAX_STEPS).expect("program runs");
    let server = Server::new(session, None);

    if std::env::args().any(|a| a == "--listen") {
        println!("listening on http://127.0.0.1:8080/api/trace");
        return server.listen(8080);
    }
    for target in [
        "/api/source",
        "/api/search?q=factorial%202",
        "/api/search?mode=function&q=factorial&naive=1",
        "/api/step/12/expand",
        "/api/step/99/expand",
        "/api/trace?policy=c",
    ] {
        let response = server.handle(target);
        println!("GET {target} -> {} {}", response.status, response.content_type);
        print!("{}", String::from_utf8_lossy(&response.body));
        println!();
    }
    Ok(())
}
