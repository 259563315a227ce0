"""
Committed sample pools for synthetic ballots
Candidate and write-in pools are disjoint
"""

CONTEST_TITLES = (
    "President and Vice-President",
    "Governor",
    "Lieutenant Governor",
    "Attorney General",
    "U.S. Senator",
    "State Senator",
    "State Representative",
    "County Commissioner",
    "Sheriff",
    "School Board",
    "Comptroller",
    "Soil and Water Supervisor",
)

PARTIES = (
    "Blue Party",
    "Green Party",
    "Liberty Party",
    "Harbor Party",
    "Civic Union",
    "Prairie Alliance",
)

CANDIDATE_NAMES = (
    "Eleanor Whitfield",
    "Marcus Okafor",
    "Priya Raman",
    "Tobias Lindqvist",
    "Adaeze Nwosu",
    "Harold Beaumont",
    "Lucia Fernandez",
    "Kenji Watanabe",
    "Beatrice Holloway",
    "Samuel Achterberg",
    "Rosalind Chen",
    "Desmond Pryce",
    "Ingrid Solberg",
    "Rafael Castellano",
    "Winifred Abbott",
    "Gideon Mbeki",
    "Cordelia Hart",
    "Anton Petrovic",
    "Nadia Haddad",
    "Everett Sinclair",
    "Florence Oyelaran",
    "Hugo Bramwell",
    "Mei-Ling Tsai",
    "Oscar Delacroix",
    "Theodora Quinlan",
    "Silas Fairbanks",
    "Amara Diallo",
    "Reginald Thorne",
    "Camille Rousseau",
    "Bertram Ellison",
    "Yolanda Esparza",
    "Leopold Hayward",
    "Imogen Carrick",
    "Dmitri Sokolov",
    "Henrietta Blake",
    "Augustin Moreau",
    "Beverly Kowalski",
    "Cyrus Farahani",
    "Ottilie Brandt",
    "Wendell Harrington",
    "Josephine Adeyemi",
    "Lorenzo Bianchi",
)

# Write-ins lean on letters that are rare in the candidate pool
WRITEIN_NAMES = (
    "Zyx Quobb",
    "Vuk Zqwyj",
    "Jyx Ovvik",
    "Quzz Wyck",
    "Xoq Jumvy",
    "Zuzu Kjox",
    "Wyq Xuzz",
    "Ovyx Qujj",
    "Kyzz Vuxo",
    "Jojq Zywv",
)

SIMILAR_PAIR_PARTY = "Unity Party"
WRITE_IN_PARTY = "Write-in"
