#pragma once

// Sample counseling transcript used as a parser fixture (25 utterances,
// positive-attitude client).
inline constexpr const char* kSampleTranscript =
    "Counselor: Hi Margaret, I'm glad you decided to come in today. How are you feeling right now?\n"
    "Client: Hi there. I'm feeling a bit nervous but also hopeful that talking to you might help me with what I've been experiencing.\n"
    "Counselor: That's completely understandable. It's okay to feel nervous. Can you tell me a little about what's been going on that led you to seek counseling?\n"
    "Client: Well, I've always felt like people think of me as a nerd, and that makes me feel socially inadequate. Recently, this feeling has become stronger since I started my new job at Google. I find it hard to interact with my colleagues, and it’s making me feel isolated.\n"
    "Counselor: Thank you for sharing that. It sounds like these thoughts have been with you for a long time and have currently intensified. Can you describe any specific situations where these feelings of social inadequacy are most pronounced?\n"
    "Client: It's mostly during team meetings and social gatherings. I see other people talking and getting along easily, and I just don’t feel like I fit in. I end up avoiding these situations as much as I can.\n"
    "Counselor: That must be really challenging for you. When you say you don't feel like you fit in, what specific thoughts or images come to mind during those moments?\n"
    "Client: I think that everyone sees me as awkward or nerdy. It seems like they all have this ease about them that I just can't achieve. I end up feeling like I'm just a useless social person.\n"
    "Counselor: I see. These thoughts sound quite distressing. If we were to focus on one particularly troubling thought, which one would you say stands out the most?\n"
    "Client: The thought that I’m a useless social person because people see me as a nerd. That one really bothers me.\n"
    "Counselor: That makes sense. Let's explore this thought further. You mentioned that people think of you as a nerd. Can you recall any specific interactions or moments that led you to this conclusion?\n"
    "Client: Yes, there have been times when I’ve tried to join a conversation, but it felt like people didn’t take me seriously or quickly lost interest. It's easy to think they're judging me based on my awkwardness or my technical background.\n"
    "Counselor: It's natural to feel disheartened by those experiences. Let’s consider testing out a different perspective. If you were to initiate a conversation with a colleague, what do you imagine would happen?\n"
    "Client: Honestly, I feel like they might just be polite but not really engage with me. They might find me boring or too nerdy to be interesting.\n"
    "Counselor: That’s an understandable concern. How about we think of it as an experiment? What if you were to approach one colleague this week and start a conversation? What kind of outcome would you be looking for in this experiment?\n"
    "Client: I guess I would hope that the conversation goes well and the person is genuinely interested, but that feels unlikely to me right now.\n"
    "Counselor: It might feel unlikely, but it's worth exploring. How about we frame our hypothesis like this: \"Initiating a conversation with a new colleague could result in a positive interaction.\" Would you be willing to test this hypothesis?\n"
    "Client: Okay, I can try that. It sounds a bit scary, but I know it's something I should do.\n"
    "Counselor: Great, Margaret. When you carry out this experiment, pay close attention to how the conversation unfolds. Notice any evidence that supports or contradicts your worries about being seen as boring or nerdy. How does that sound?\n"
    "Client: That makes sense. I’ll pay attention to how they respond and how I’m feeling during the conversation.\n"
    "Counselor: Perfect. After you've tried this, we can discuss the results and see how they match up with your initial thoughts. If you're ready, could you think of a specific colleague you might approach?\n"
    "Client: Yes, there's a new team member who started around the same time as me. Maybe I could talk to her since she's in a similar boat.\n"
    "Counselor: Excellent choice. It might help to start with someone who's also new. I'm looking forward to hearing how it goes. Remember, this is just one step, and it’s perfectly fine regardless of the outcome.\n"
    "Client: Thank you. I appreciate the guidance. I’ll give it a try and let you know what happens.\n"
    "Counselor: You’re welcome, Margaret. It takes courage to face these fears, and you’re doing great. I look forward to hearing about your experience next time we meet. Take care, and see you soon."
;
