"""App Store category vocabulary.

The 27 labels below are the category list used for widget annotation. The
list is configuration, not a hard-coded truth: edit this module (or pass a
custom list to the validation helpers) if the upstream store taxonomy
changes.
"""

APP_STORE_CATEGORIES = (
    "Books",
    "Business",
    "Developer Tools",
    "Education",
    "Entertainment",
    "Finance",
    "Food & Drink",
    "Games",
    "Graphics & Design",
    "Health & Fitness",
    "Kids",
    "Lifestyle",
    "Magazines & Newspapers",
    "Medical",
    "Music",
    "Navigation",
    "News",
    "Photo & Video",
    "Productivity",
    "Reference",
    "Shopping",
    "Social Networking",
    "Sports",
    "Stickers",
    "Travel",
    "Utilities",
    "Weather",
)

assert len(APP_STORE_CATEGORIES) == 27

CATEGORY_SET = frozenset(APP_STORE_CATEGORIES)
