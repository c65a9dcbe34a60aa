//! Bundled synonym table for the rule-based paraphraser.

pub(crate) const SYNONYMS: &[(&str, &[&str])] = &[
    ("fast", &["quick", "rapid", "swift"]),
    ("slow", &["sluggish", "unhurried"]),
    ("big", &["large", "huge", "sizable"]),
    ("small", &["little", "tiny", "compact"]),
    ("important", &["significant", "crucial", "essential"]),
    ("show", &["demonstrate", "reveal", "exhibit"]),
    ("shows", &["demonstrates", "reveals", "exhibits"]),
    ("use", &["employ", "utilize", "apply"]),
    ("uses", &["employs", "utilizes", "applies"]),
    ("used", &["employed", "utilized", "applied"]),
    ("method", &["approach", "technique", "procedure"]),
    ("methods", &["approaches", "techniques", "procedures"]),
    ("result", &["outcome", "finding"]),
    ("results", &["outcomes", "findings"]),
    ("problem", &["issue", "difficulty", "challenge"]),
    ("problems", &["issues", "difficulties", "challenges"]),
    ("improve", &["enhance", "boost", "refine"]),
    ("improves", &["enhances", "boosts", "refines"]),
    ("increase", &["raise", "grow", "expand"]),
    ("increases", &["raises", "grows", "expands"]),
    ("decrease", &["reduce", "lower", "diminish"]),
    ("decreases", &["reduces", "lowers", "diminishes"]),
    ("good", &["fine", "solid", "favorable"]),
    ("bad", &["poor", "weak", "unfavorable"]),
    ("new", &["novel", "fresh", "recent"]),
    ("old", &["earlier", "former", "previous"]),
    ("many", &["numerous", "several", "various"]),
    ("often", &["frequently", "commonly", "regularly"]),
    ("quickly", &["rapidly", "swiftly", "promptly"]),
    ("slowly", &["gradually", "steadily"]),
    ("clearly", &["evidently", "plainly", "obviously"]),
    ("simple", &["basic", "plain", "straightforward"]),
    ("complex", &["complicated", "intricate", "elaborate"]),
    ("accurate", &["precise", "exact", "correct"]),
    ("model", &["framework", "system", "architecture"]),
    ("models", &["frameworks", "systems", "architectures"]),
    ("data", &["information", "records", "observations"]),
    ("study", &["investigation", "analysis", "examination"]),
    ("studies", &["investigations", "analyses", "examinations"]),
    ("task", &["job", "assignment", "objective"]),
    ("tasks", &["jobs", "assignments", "objectives"]),
    ("goal", &["aim", "target", "purpose"]),
    ("goals", &["aims", "targets", "purposes"]),
    ("build", &["construct", "create", "assemble"]),
    ("builds", &["constructs", "creates", "assembles"]),
    ("make", &["produce", "create", "generate"]),
    ("makes", &["produces", "creates", "generates"]),
    ("get", &["obtain", "acquire", "gain"]),
    ("gets", &["obtains", "acquires", "gains"]),
    ("help", &["assist", "aid", "support"]),
    ("helps", &["assists", "aids", "supports"]),
    ("need", &["require", "demand"]),
    ("needs", &["requires", "demands"]),
    ("try", &["attempt", "seek"]),
    ("tries", &["attempts", "seeks"]),
    ("start", &["begin", "commence", "initiate"]),
    ("starts", &["begins", "commences", "initiates"]),
    ("end", &["finish", "conclude", "terminate"]),
    ("ends", &["finishes", "concludes", "terminates"]),
    ("find", &["discover", "identify", "locate"]),
    ("finds", &["discovers", "identifies", "locates"]),
    ("check", &["verify", "examine", "inspect"]),
    ("checks", &["verifies", "examines", "inspects"]),
    ("change", &["alter", "modify", "adjust"]),
    ("changes", &["alters", "modifies", "adjusts"]),
    ("keep", &["retain", "maintain", "preserve"]),
    ("keeps", &["retains", "maintains", "preserves"]),
    ("give", &["provide", "supply", "offer"]),
    ("gives", &["provides", "supplies", "offers"]),
    ("allow", &["permit", "enable", "let"]),
    ("allows", &["permits", "enables", "lets"]),
    ("combine", &["merge", "join", "unite"]),
    ("combines", &["merges", "joins", "unites"]),
    ("split", &["divide", "separate", "partition"]),
    ("splits", &["divides", "separates", "partitions"]),
    ("choose", &["select", "pick", "opt"]),
    ("chooses", &["selects", "picks", "opts"]),
    ("explain", &["describe", "clarify", "illustrate"]),
    ("explains", &["describes", "clarifies", "illustrates"]),
    ("suggest", &["propose", "indicate", "imply"]),
    ("suggests", &["proposes", "indicates", "implies"]),
    ("large", &["big", "vast", "extensive"]),
    ("tiny", &["minute", "minuscule"]),
    ("high", &["elevated", "tall", "lofty"]),
    ("low", &["reduced", "minor", "modest"]),
    ("strong", &["robust", "powerful", "sturdy"]),
    ("weak", &["feeble", "fragile", "frail"]),
    ("easy", &["effortless", "simple", "painless"]),
    ("hard", &["difficult", "tough", "demanding"]),
    ("main", &["primary", "principal", "chief"]),
    ("key", &["central", "vital", "critical"]),
    ("common", &["usual", "typical", "widespread"]),
    ("rare", &["uncommon", "unusual", "scarce"]),
    ("different", &["distinct", "diverse", "dissimilar"]),
    ("similar", &["alike", "comparable", "akin"]),
    ("whole", &["entire", "complete", "full"]),
    ("part", &["portion", "component", "piece"]),
    ("parts", &["portions", "components", "pieces"]),
    ("way", &["manner", "means", "route"]),
    ("ways", &["manners", "means", "routes"]),
    ("idea", &["notion", "concept", "thought"]),
    ("ideas", &["notions", "concepts", "thoughts"]),
    ("area", &["region", "domain", "field"]),
    ("areas", &["regions", "domains", "fields"]),
    ("effect", &["impact", "influence", "consequence"]),
    ("effects", &["impacts", "influences", "consequences"]),
    ("reason", &["cause", "motive", "basis"]),
    ("reasons", &["causes", "motives", "bases"]),
    ("answer", &["response", "reply", "solution"]),
    ("answers", &["responses", "replies", "solutions"]),
    ("question", &["query", "inquiry"]),
    ("questions", &["queries", "inquiries"]),
    ("error", &["mistake", "fault", "flaw"]),
    ("errors", &["mistakes", "faults", "flaws"]),
    ("speed", &["velocity", "pace", "rate"]),
    ("size", &["magnitude", "dimension", "extent"]),
    ("amount", &["quantity", "volume", "sum"]),
    ("level", &["degree", "grade", "tier"]),
    ("step", &["stage", "phase"]),
    ("steps", &["stages", "phases"]),
    ("process", &["procedure", "operation", "workflow"]),
    ("feature", &["attribute", "property", "trait"]),
    ("features", &["attributes", "properties", "traits"]),
    ("test", &["trial", "experiment", "evaluation"]),
    ("tests", &["trials", "experiments", "evaluations"]),
    ("tool", &["instrument", "utility", "device"]),
    ("tools", &["instruments", "utilities", "devices"]),
    ("rule", &["principle", "guideline", "regulation"]),
    ("rules", &["principles", "guidelines", "regulations"]),
    ("group", &["cluster", "set", "collection"]),
    ("groups", &["clusters", "sets", "collections"]),
    ("image", &["picture", "photo", "figure"]),
    ("images", &["pictures", "photos", "figures"]),
    ("text", &["passage", "writing", "document"]),
    ("texts", &["passages", "writings", "documents"]),
    ("word", &["term", "expression"]),
    ("words", &["terms", "expressions"]),
    ("paper", &["article", "manuscript", "report"]),
    ("papers", &["articles", "manuscripts", "reports"]),
    ("author", &["writer", "creator"]),
    ("authors", &["writers", "creators"]),
    ("network", &["net", "graph", "web"]),
    ("networks", &["nets", "graphs", "webs"]),
    ("layer", &["level", "stratum", "tier"]),
    ("layers", &["levels", "strata", "tiers"]),
    ("input", &["entry", "feed"]),
    ("inputs", &["entries", "feeds"]),
    ("output", &["yield", "product"]),
    ("outputs", &["yields", "products"]),
    ("value", &["quantity", "figure", "number"]),
    ("values", &["quantities", "figures", "numbers"]),
    ("search", &["lookup", "hunt", "quest"]),
    ("memory", &["storage", "recall"]),
    ("time", &["duration", "period", "interval"]),
    ("cost", &["expense", "price", "charge"]),
    ("costs", &["expenses", "prices", "charges"]),
    ("accuracy", &["precision", "correctness", "exactness"]),
    ("performance", &["efficiency", "effectiveness", "capability"]),
    ("experiment", &["trial", "test", "study"]),
    ("experiments", &["trials", "tests", "studies"]),
    ("approach", &["method", "strategy", "tactic"]),
    ("approaches", &["methods", "strategies", "tactics"]),
    ("system", &["framework", "setup", "platform"]),
    ("systems", &["frameworks", "setups", "platforms"]),
    ("structure", &["arrangement", "organization", "layout"]),
    ("detail", &["specific", "particular", "element"]),
    ("details", &["specifics", "particulars", "elements"]),
    ("example", &["instance", "case", "sample"]),
    ("examples", &["instances", "cases", "samples"]),
    ("sample", &["specimen", "example"]),
    ("samples", &["specimens", "examples"]),
    ("run", &["operate", "execute", "function"]),
    ("runs", &["operates", "executes", "functions"]),
    ("work", &["operate", "function", "perform"]),
    ("works", &["operates", "functions", "performs"]),
    ("learn", &["acquire", "absorb", "master"]),
    ("learns", &["acquires", "absorbs", "masters"]),
    ("train", &["teach", "educate", "fit"]),
    ("trains", &["teaches", "educates", "fits"]),
    ("predict", &["forecast", "anticipate", "foresee"]),
    ("predicts", &["forecasts", "anticipates", "foresees"]),
    ("compare", &["contrast", "match", "weigh"]),
    ("compares", &["contrasts", "matches", "weighs"]),
    ("measure", &["gauge", "quantify", "assess"]),
    ("measures", &["gauges", "quantifies", "assesses"]),
    ("detect", &["spot", "notice", "uncover"]),
    ("detects", &["spots", "notices", "uncovers"]),
    ("reduce", &["cut", "shrink", "lessen"]),
    ("reduces", &["cuts", "shrinks", "lessens"]),
    ("store", &["save", "hold", "keep"]),
    ("stores", &["saves", "holds", "keeps"]),
    ("focus", &["concentrate", "center"]),
    ("focuses", &["concentrates", "centers"]),
    ("achieve", &["attain", "reach", "accomplish"]),
    ("achieves", &["attains", "reaches", "accomplishes"]),
    ("describe", &["depict", "portray", "outline"]),
    ("describes", &["depicts", "portrays", "outlines"]),
    ("present", &["introduce", "offer", "put forward"]),
    ("presents", &["introduces", "offers", "puts forward"]),
    ("apply", &["employ", "use", "implement"]),
    ("applies", &["employs", "uses", "implements"]),
    ("obtain", &["acquire", "get", "secure"]),
    ("obtains", &["acquires", "gets", "secures"]),
    ("require", &["need", "demand", "necessitate"]),
    ("requires", &["needs", "demands", "necessitates"]),
    ("produce", &["generate", "yield", "create"]),
    ("produces", &["generates", "yields", "creates"]),
    ("handle", &["manage", "process", "treat"]),
    ("handles", &["manages", "processes", "treats"]),
    ("major", &["significant", "leading", "principal"]),
    ("minor", &["slight", "small", "trivial"]),
    ("recent", &["latest", "current", "modern"]),
    ("typical", &["standard", "normal", "usual"]),
    ("efficient", &["effective", "economical", "productive"]),
    ("robust", &["resilient", "sturdy", "stable"]),
    ("useful", &["helpful", "valuable", "practical"]),
    ("possible", &["feasible", "viable", "potential"]),
    ("likely", &["probable", "expected"]),
    ("directly", &["straight", "immediately"]),
    ("mostly", &["largely", "mainly", "chiefly"]),
    ("usually", &["generally", "normally", "typically"]),
    ("finally", &["lastly", "ultimately", "eventually"]),
    ("however", &["nevertheless", "nonetheless", "yet"]),
    ("therefore", &["thus", "hence", "consequently"]),
];

/// Function words swapped in both directions, each with probability one half.
pub(crate) const FUNCTION_SWAPS: &[(&str, &str)] = &[
    ("this", "that"),
    ("that", "this"),
    ("these", "those"),
    ("those", "these"),
    ("also", "additionally"),
    ("additionally", "also"),
];
