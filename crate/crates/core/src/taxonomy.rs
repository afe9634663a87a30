//! The configuration-defect taxonomy: 15 defect categories with their
//! sub-categories, 12 consequence codes, 9 fix-pattern codes, and the
//! observed frequency tables backing the modal consequence/fix lookups.
//!
//! The frequency tables are embedded verbatim as static data so the modal
//! lookups stay auditable against the source counts.

use std::fmt;
use std::str::FromStr;

use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

/// Top-level defect category.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Category {
    Conditional,
    ContainerProvisioning,
    CustomResource,
    DataFields,
    EntityReferencing,
    IncorrectHelming,
    Namespaces,
    Orphanism,
    PodScheduling,
    Probing,
    PropertyAnnotation,
    Security,
    UnsatisfiedDependency,
    VersionIncompatibility,
    VolumeMounting,
}

impl Category {
    pub const ALL: [Category; 15] = [
        Category::Conditional,
        Category::ContainerProvisioning,
        Category::CustomResource,
        Category::DataFields,
        Category::EntityReferencing,
        Category::IncorrectHelming,
        Category::Namespaces,
        Category::Orphanism,
        Category::PodScheduling,
        Category::Probing,
        Category::PropertyAnnotation,
        Category::Security,
        Category::UnsatisfiedDependency,
        Category::VersionIncompatibility,
        Category::VolumeMounting,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Category::Conditional => "Conditional",
            Category::ContainerProvisioning => "ContainerProvisioning",
            Category::CustomResource => "CustomResource",
            Category::DataFields => "DataFields",
            Category::EntityReferencing => "EntityReferencing",
            Category::IncorrectHelming => "IncorrectHelming",
            Category::Namespaces => "Namespaces",
            Category::Orphanism => "Orphanism",
            Category::PodScheduling => "PodScheduling",
            Category::Probing => "Probing",
            Category::PropertyAnnotation => "PropertyAnnotation",
            Category::Security => "Security",
            Category::UnsatisfiedDependency => "UnsatisfiedDependency",
            Category::VersionIncompatibility => "VersionIncompatibility",
            Category::VolumeMounting => "VolumeMounting",
        }
    }

    fn table_index(self) -> usize {
        Category::ALL.iter().position(|c| *c == self).unwrap()
    }
}

impl fmt::Display for Category {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Category {
    type Err = TaxonomyError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Category::ALL
            .into_iter()
            .find(|c| c.name() == s)
            .ok_or_else(|| TaxonomyError::UnknownCategory(s.to_string()))
    }
}

/// Sub-category codes. Only ContainerProvisioning, DataFields, and
/// Security have sub-categories.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum SubCategory {
    /// Command Line Arguments
    Cla,
    /// Resource limits/requests
    Resources,
    /// Base64 String and Encoding
    Bse,
    /// Incorrect Data Types
    Idt,
    /// Incorrect URL Path Types
    Iupt,
    /// Syntax errors
    Syntax,
    /// Violation of Restrictions
    Vr,
    /// Access Control
    Ac,
    /// Exposure of Sensitive Data
    Esd,
    /// Privileged Ports
    Pp,
    /// Security Context
    Sc,
}

impl SubCategory {
    pub fn code(self) -> &'static str {
        match self {
            SubCategory::Cla => "CLA",
            SubCategory::Resources => "Resources",
            SubCategory::Bse => "BSE",
            SubCategory::Idt => "IDT",
            SubCategory::Iupt => "IUPT",
            SubCategory::Syntax => "Syntax",
            SubCategory::Vr => "VR",
            SubCategory::Ac => "AC",
            SubCategory::Esd => "ESD",
            SubCategory::Pp => "PP",
            SubCategory::Sc => "SC",
        }
    }

    /// The category this sub-category belongs to.
    pub fn parent(self) -> Category {
        match self {
            SubCategory::Cla | SubCategory::Resources => Category::ContainerProvisioning,
            SubCategory::Bse
            | SubCategory::Idt
            | SubCategory::Iupt
            | SubCategory::Syntax
            | SubCategory::Vr => Category::DataFields,
            SubCategory::Ac | SubCategory::Esd | SubCategory::Pp | SubCategory::Sc => {
                Category::Security
            }
        }
    }
}

impl fmt::Display for SubCategory {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.code())
    }
}

impl FromStr for SubCategory {
    type Err = TaxonomyError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        const ALL: [SubCategory; 11] = [
            SubCategory::Cla,
            SubCategory::Resources,
            SubCategory::Bse,
            SubCategory::Idt,
            SubCategory::Iupt,
            SubCategory::Syntax,
            SubCategory::Vr,
            SubCategory::Ac,
            SubCategory::Esd,
            SubCategory::Pp,
            SubCategory::Sc,
        ];
        ALL.into_iter()
            .find(|c| c.code() == s)
            .ok_or_else(|| TaxonomyError::UnknownSubCategory(s.to_string()))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum TaxonomyError {
    #[error("unknown defect category: {0}")]
    UnknownCategory(String),
    #[error("unknown sub-category: {0}")]
    UnknownSubCategory(String),
    #[error("sub-category {sub} does not belong to category {category}")]
    InvalidPair { category: Category, sub: SubCategory },
}

/// A defect category with an optional sub-category. Construction enforces
/// that sub-categories only appear under their parent category.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct DefectCategory {
    category: Category,
    sub_category: Option<SubCategory>,
}

impl DefectCategory {
    pub fn new(category: Category) -> Self {
        Self {
            category,
            sub_category: None,
        }
    }

    pub fn with_sub(category: Category, sub: SubCategory) -> Result<Self, TaxonomyError> {
        if sub.parent() != category {
            return Err(TaxonomyError::InvalidPair { category, sub });
        }
        Ok(Self {
            category,
            sub_category: Some(sub),
        })
    }

    pub fn category(&self) -> Category {
        self.category
    }

    pub fn sub_category(&self) -> Option<SubCategory> {
        self.sub_category
    }

    /// Parses `Category` or `Category/SUB` notation.
    pub fn parse(text: &str) -> Result<Self, TaxonomyError> {
        match text.split_once('/') {
            Some((cat, sub)) => {
                let category = cat.trim().parse()?;
                let sub = sub.trim().parse()?;
                Self::with_sub(category, sub)
            }
            None => Ok(Self::new(text.trim().parse()?)),
        }
    }
}

impl From<Category> for DefectCategory {
    fn from(category: Category) -> Self {
        Self::new(category)
    }
}

impl fmt::Display for DefectCategory {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.sub_category {
            Some(sub) => write!(f, "{}/{}", self.category, sub),
            None => self.category.fmt(f),
        }
    }
}

impl FromStr for DefectCategory {
    type Err = TaxonomyError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Self::parse(s)
    }
}

impl Serialize for DefectCategory {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for DefectCategory {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        DefectCategory::parse(&s).map_err(D::Error::custom)
    }
}

/// The 12 consequence codes, in table column order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Consequence {
    CompilerWarning,
    ConfigurationInexecutability,
    Crash,
    DiagnoseInability,
    ExposureOfUnauthorizedData,
    Hang,
    IncorrectArtifactGeneration,
    IncorrectOperations,
    IncorrectRendering,
    Outage,
    Performance,
    UnpredictableResponses,
}

impl Consequence {
    pub const ALL: [Consequence; 12] = [
        Consequence::CompilerWarning,
        Consequence::ConfigurationInexecutability,
        Consequence::Crash,
        Consequence::DiagnoseInability,
        Consequence::ExposureOfUnauthorizedData,
        Consequence::Hang,
        Consequence::IncorrectArtifactGeneration,
        Consequence::IncorrectOperations,
        Consequence::IncorrectRendering,
        Consequence::Outage,
        Consequence::Performance,
        Consequence::UnpredictableResponses,
    ];

    pub fn code(self) -> &'static str {
        match self {
            Consequence::CompilerWarning => "CW",
            Consequence::ConfigurationInexecutability => "CI",
            Consequence::Crash => "Crash",
            Consequence::DiagnoseInability => "DI",
            Consequence::ExposureOfUnauthorizedData => "EUD",
            Consequence::Hang => "Hang",
            Consequence::IncorrectArtifactGeneration => "IAG",
            Consequence::IncorrectOperations => "InOp",
            Consequence::IncorrectRendering => "IR",
            Consequence::Outage => "Outage",
            Consequence::Performance => "Performance",
            Consequence::UnpredictableResponses => "UR",
        }
    }
}

impl fmt::Display for Consequence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.code())
    }
}

impl FromStr for Consequence {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Consequence::ALL
            .into_iter()
            .find(|c| c.code() == s)
            .ok_or_else(|| format!("unknown consequence code: {s}"))
    }
}

impl Serialize for Consequence {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(self.code())
    }
}

impl<'de> Deserialize<'de> for Consequence {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(D::Error::custom)
    }
}

/// The 9 fix-pattern codes, in table column order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum FixPattern {
    AddingConditionalStatements,
    ConfigurationValueChanges,
    DirectiveFix,
    EnvironmentVariableFix,
    ObjectModification,
    PropertyModification,
    Relocation,
    RuleFix,
    SyntaxFix,
}

impl FixPattern {
    pub const ALL: [FixPattern; 9] = [
        FixPattern::AddingConditionalStatements,
        FixPattern::ConfigurationValueChanges,
        FixPattern::DirectiveFix,
        FixPattern::EnvironmentVariableFix,
        FixPattern::ObjectModification,
        FixPattern::PropertyModification,
        FixPattern::Relocation,
        FixPattern::RuleFix,
        FixPattern::SyntaxFix,
    ];

    pub fn code(self) -> &'static str {
        match self {
            FixPattern::AddingConditionalStatements => "ACS",
            FixPattern::ConfigurationValueChanges => "CVC",
            FixPattern::DirectiveFix => "DF",
            FixPattern::EnvironmentVariableFix => "EVF",
            FixPattern::ObjectModification => "OM",
            FixPattern::PropertyModification => "PM",
            FixPattern::Relocation => "Relocation",
            FixPattern::RuleFix => "RF",
            FixPattern::SyntaxFix => "SF",
        }
    }

    /// Definition of the fix pattern, used as the generic fix suggestion
    /// when a rule supplies no specific hint.
    pub fn definition(self) -> &'static str {
        match self {
            FixPattern::AddingConditionalStatements => {
                "This fix pattern corresponds to adding conditional statements."
            }
            FixPattern::ConfigurationValueChanges => {
                "This fix pattern corresponds to changing configuration values."
            }
            FixPattern::DirectiveFix => {
                "This fix pattern corresponds to fixing a template directive in order to \
                 populate an YAML file with the correct configuration values."
            }
            FixPattern::EnvironmentVariableFix => {
                "This fix pattern corresponds to changing environment variables used for \
                 the container runtime."
            }
            FixPattern::ObjectModification => {
                "This fix pattern corresponds to the creation or deletion of Kubernetes objects."
            }
            FixPattern::PropertyModification => {
                "This fix pattern corresponds to property addition or property deletion \
                 for a certain Kubernetes object."
            }
            FixPattern::Relocation => {
                "This fix pattern corresponds to relocation of Kubernetes objects, paths, \
                 and properties."
            }
            FixPattern::RuleFix => {
                "This fix pattern corresponds to rules used for setting up access control \
                 policies using apiGroups, resources, and/or verbs, such as 'get', 'list', \
                 'create', and 'delete'."
            }
            FixPattern::SyntaxFix => "This fix pattern corresponds to fixing syntax issues.",
        }
    }
}

impl fmt::Display for FixPattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.code())
    }
}

impl FromStr for FixPattern {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        FixPattern::ALL
            .into_iter()
            .find(|c| c.code() == s)
            .ok_or_else(|| format!("unknown fix pattern code: {s}"))
    }
}

impl Serialize for FixPattern {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(self.code())
    }
}

impl<'de> Deserialize<'de> for FixPattern {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(D::Error::custom)
    }
}

/// Observed defect consequences per category. Rows follow [`Category::ALL`]
/// order; columns follow [`Consequence::ALL`] order
/// (CW, CI, Crash, DI, EUD, Hang, IAG, InOp, IR, Outage, Performance, UR).
pub const CONSEQUENCE_COUNTS: [[u32; 12]; 15] = [
    [0, 9, 13, 0, 0, 1, 9, 1, 0, 6, 0, 1],       // Conditional
    [0, 7, 4, 1, 0, 2, 1, 8, 0, 24, 4, 1],       // ContainerProvisioning
    [0, 3, 13, 6, 0, 1, 2, 6, 0, 13, 2, 0],      // CustomResource
    [1, 3, 57, 0, 0, 3, 0, 6, 0, 15, 2, 0],      // DataFields
    [0, 19, 34, 5, 0, 1, 2, 25, 2, 26, 7, 4],    // EntityReferencing
    [0, 8, 1, 0, 0, 0, 0, 0, 0, 3, 0, 1],        // IncorrectHelming
    [0, 0, 1, 0, 0, 0, 0, 11, 0, 3, 0, 0],       // Namespaces
    [0, 0, 1, 0, 0, 0, 0, 2, 0, 0, 7, 0],        // Orphanism
    [0, 1, 1, 0, 0, 0, 0, 3, 0, 4, 3, 0],        // PodScheduling
    [0, 1, 3, 0, 0, 0, 0, 0, 0, 12, 2, 4],       // Probing
    [0, 0, 2, 2, 0, 1, 0, 3, 0, 3, 1, 0],        // PropertyAnnotation
    [1, 0, 2, 4, 9, 1, 0, 63, 0, 12, 0, 0],      // Security
    [0, 1, 6, 7, 0, 6, 0, 46, 0, 29, 7, 3],      // UnsatisfiedDependency
    [7, 0, 17, 2, 0, 1, 1, 13, 0, 15, 0, 2],     // VersionIncompatibility
    [1, 0, 6, 2, 0, 1, 0, 7, 0, 13, 0, 0],       // VolumeMounting
];

/// Observed fix patterns per category. Rows follow [`Category::ALL`] order;
/// columns follow [`FixPattern::ALL`] order
/// (ACS, CVC, DF, EVF, OM, PM, Relocation, RF, SF).
pub const FIX_PATTERN_COUNTS: [[u32; 9]; 15] = [
    [13, 0, 27, 0, 0, 0, 0, 0, 0],   // Conditional
    [1, 32, 3, 9, 1, 4, 1, 1, 0],    // ContainerProvisioning
    [3, 9, 3, 0, 2, 29, 0, 0, 0],    // CustomResource
    [4, 8, 23, 1, 4, 12, 1, 0, 34],  // DataFields
    [10, 58, 41, 2, 0, 7, 4, 3, 0],  // EntityReferencing
    [0, 0, 9, 1, 0, 3, 0, 0, 0],     // IncorrectHelming
    [0, 2, 3, 1, 1, 6, 0, 2, 0],     // Namespaces
    [0, 3, 1, 0, 5, 0, 0, 1, 0],     // Orphanism
    [2, 0, 1, 0, 0, 9, 0, 0, 0],     // PodScheduling
    [1, 6, 0, 0, 0, 15, 0, 0, 0],    // Probing
    [2, 6, 1, 0, 0, 3, 0, 0, 0],     // PropertyAnnotation
    [1, 4, 3, 0, 2, 11, 0, 71, 0],   // Security
    [11, 11, 2, 5, 16, 25, 2, 33, 0], // UnsatisfiedDependency
    [14, 32, 5, 0, 1, 4, 2, 0, 0],   // VersionIncompatibility
    [4, 3, 1, 0, 0, 20, 2, 0, 0],    // VolumeMounting
];

/// Consequence frequencies for one category, in [`Consequence::ALL`] order.
pub fn consequence_counts(category: Category) -> &'static [u32; 12] {
    &CONSEQUENCE_COUNTS[category.table_index()]
}

/// Fix-pattern frequencies for one category, in [`FixPattern::ALL`] order.
pub fn fix_pattern_counts(category: Category) -> &'static [u32; 9] {
    &FIX_PATTERN_COUNTS[category.table_index()]
}

fn argmax_leftmost(row: &[u32]) -> usize {
    let mut best = 0;
    for (i, &v) in row.iter().enumerate() {
        if v > row[best] {
            best = i;
        }
    }
    best
}

/// The most frequently observed consequence for a category. Ties break by
/// column order (leftmost wins).
pub fn default_consequence(category: Category) -> Consequence {
    Consequence::ALL[argmax_leftmost(consequence_counts(category))]
}

/// The most frequently observed fix pattern for a category. Ties break by
/// column order (leftmost wins).
pub fn default_fix_pattern(category: Category) -> FixPattern {
    FixPattern::ALL[argmax_leftmost(fix_pattern_counts(category))]
}
